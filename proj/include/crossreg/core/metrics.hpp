#pragma once

#include "crossreg/core/types.hpp"

#include <vector>

namespace crossreg {

/// Geodesic rotation distance in degrees:
/// arccos(clamp((trace(r_gt^T r_est) - 1) / 2, -1, 1)) * 180 / pi.
double rre(const Mat3& r_est, const Mat3& r_gt);

/// Euclidean translation error in meters.
double rte(const Vec3& t_est, const Vec3& t_gt);

/// Fraction of pairs (i, j) with |R_gt p_i + t_gt - q_j| < tau.
/// An empty set yields 0 and sets *empty_warning when provided.
double inlier_ratio(const CorrespondenceSet& c, const PointCloud& src,
                    const PointCloud& tgt, const RigidTransform& t_gt,
                    double tau = 1.0, bool* empty_warning = nullptr);

/// Fraction of results with rre < rre_thresh AND rte < rte_thresh
/// (strict inequalities). Throws on an empty list.
double registration_recall(const std::vector<RegistrationMetrics>& results,
                           double rre_thresh_deg = 2.0,
                           double rte_thresh_m = 0.5);

}  // namespace crossreg
