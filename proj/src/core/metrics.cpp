#include "crossreg/core/metrics.hpp"

#include "crossreg/common/mathutil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crossreg {

double rre(const Mat3& r_est, const Mat3& r_gt) {
  const double tr = (r_gt.transpose() * r_est).trace();
  const double c = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
  if (c > 1.0 - 1e-8) {
    // arccos cannot resolve angles below ~sqrt(eps) near trace = 3; the
    // identity |R1 - R2|_F = 2 sqrt(2) |sin(theta/2)| gives the same angle
    // with full precision in the small-angle regime.
    const double s = (r_est - r_gt).norm() / (2.0 * std::sqrt(2.0));
    return rad2deg(2.0 * std::asin(std::clamp(s, 0.0, 1.0)));
  }
  return rad2deg(std::acos(c));
}

double rte(const Vec3& t_est, const Vec3& t_gt) { return (t_est - t_gt).norm(); }

double inlier_ratio(const CorrespondenceSet& c, const PointCloud& src,
                    const PointCloud& tgt, const RigidTransform& t_gt,
                    double tau, bool* empty_warning) {
  if (!(tau > 0.0)) throw std::invalid_argument("inlier ratio threshold must be positive");
  if (empty_warning) *empty_warning = false;
  if (c.empty()) {
    if (empty_warning) *empty_warning = true;
    return 0.0;
  }
  std::size_t inliers = 0;
  for (const auto& [i, j] : c.pairs) {
    const double d = (t_gt * src.points[i] - tgt.points[j]).norm();
    if (d < tau) ++inliers;
  }
  return static_cast<double>(inliers) / static_cast<double>(c.size());
}

double registration_recall(const std::vector<RegistrationMetrics>& results,
                           double rre_thresh_deg, double rte_thresh_m) {
  if (results.empty()) throw std::invalid_argument("no results");
  if (!(rre_thresh_deg > 0.0) || !(rte_thresh_m > 0.0)) {
    throw std::invalid_argument("recall thresholds must be positive");
  }
  std::size_t ok = 0;
  for (const auto& r : results) {
    if (r.rre_deg < rre_thresh_deg && r.rte_m < rte_thresh_m) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(results.size());
}

}  // namespace crossreg
