#pragma once

#include "crossreg/core/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace crossreg::est {

enum class EstimatorKind { kWeightedSvd, kRansac, kLgr };

std::string estimator_name(EstimatorKind kind);
EstimatorKind estimator_from_name(const std::string& name);

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::kLgr;
  int ransac_iterations = 50000;
  double ransac_inlier_threshold = 0.5;  // meters
  int ransac_sample_size = 3;
  std::uint64_t seed = 0;
  int lgr_refine_iterations = 5;
  double lgr_inlier_threshold = 0.5;  // meters

  void validate() const;
};

struct PoseEstimate {
  RigidTransform transform;
  int inlier_count = 0;
  double mean_residual = 0.0;
};

/// Closed-form weighted Procrustes. Correspondence confidences act as weights.
/// Throws "underdetermined" below 3 pairs and "degenerate" when the two
/// smallest singular values of the weighted cross-covariance fall below 1e-12.
PoseEstimate weighted_svd(const CorrespondenceSet& c, const PointCloud& src,
                          const PointCloud& tgt);

/// Minimal 3-pair sampling, inlier counting under the threshold, best model
/// refit on its inliers. Per-iteration counter-based seeding keeps serial and
/// parallel runs identical. Throws "no consensus" when no model reaches 3
/// inliers.
PoseEstimate ransac(const CorrespondenceSet& c, const PointCloud& src,
                    const PointCloud& tgt, const EstimatorConfig& cfg);

/// Local-to-global: per-group weighted SVD candidates, best by inlier count
/// over the full correspondence set, then iterative refit on the inliers.
/// A refit is kept only when its mean residual does not increase, so the
/// residual is non-increasing across refinement steps.
PoseEstimate lgr(const std::vector<CorrespondenceSet>& groups,
                 const CorrespondenceSet& c_star, const PointCloud& src,
                 const PointCloud& tgt, const EstimatorConfig& cfg);

/// Residual statistics of `t` over the pairs with |R p + t - q| < threshold.
struct InlierStats {
  int count = 0;
  double mean_residual = 0.0;
};
InlierStats inlier_stats(const RigidTransform& t, const CorrespondenceSet& c,
                         const PointCloud& src, const PointCloud& tgt,
                         double threshold);

}  // namespace crossreg::est
