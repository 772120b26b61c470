#include "crossreg/est/estimators.hpp"

#include "crossreg/common/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crossreg::est {

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kWeightedSvd: return "weighted_svd";
    case EstimatorKind::kRansac: return "ransac";
    case EstimatorKind::kLgr: return "lgr";
  }
  return "unknown";
}

EstimatorKind estimator_from_name(const std::string& name) {
  if (name == "weighted_svd" || name == "svd") return EstimatorKind::kWeightedSvd;
  if (name == "ransac") return EstimatorKind::kRansac;
  if (name == "lgr") return EstimatorKind::kLgr;
  throw std::invalid_argument("unknown estimator: " + name);
}

void EstimatorConfig::validate() const {
  if (ransac_iterations < 1 || lgr_refine_iterations < 1) {
    throw std::invalid_argument("estimator iteration counts must be >= 1");
  }
  if (!(ransac_inlier_threshold > 0.0) || !(lgr_inlier_threshold > 0.0)) {
    throw std::invalid_argument("inlier thresholds must be positive");
  }
  if (ransac_sample_size < 3) throw std::invalid_argument("ransac sample size must be >= 3");
}

namespace {

RigidTransform fit_weighted(const CorrespondenceSet& c, const PointCloud& src,
                            const PointCloud& tgt) {
  const std::size_t n = c.size();
  double wsum = 0.0;
  Vec3 cp = Vec3::Zero(), cq = Vec3::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    const double w = c.confidence[k];
    cp += w * src.points[c.pairs[k].first];
    cq += w * tgt.points[c.pairs[k].second];
    wsum += w;
  }
  if (!(wsum > 0.0)) throw std::invalid_argument("degenerate");
  cp /= wsum;
  cq /= wsum;

  Mat3 h = Mat3::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    const double w = c.confidence[k];
    h += w * (src.points[c.pairs[k].first] - cp) *
         (tgt.points[c.pairs[k].second] - cq).transpose();
  }
  h /= wsum;

  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sigma = svd.singularValues();
  if (sigma[1] < 1e-12 && sigma[2] < 1e-12) throw std::invalid_argument("degenerate");
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  Vec3 d(1.0, 1.0, (v * u.transpose()).determinant());
  RigidTransform t;
  t.rotation = v * d.asDiagonal() * u.transpose();
  t.translation = cq - t.rotation * cp;
  return t;
}

double weighted_mean_residual(const RigidTransform& t, const CorrespondenceSet& c,
                              const PointCloud& src, const PointCloud& tgt) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double w = c.confidence[k];
    num += w * (t * src.points[c.pairs[k].first] - tgt.points[c.pairs[k].second]).norm();
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

CorrespondenceSet subset(const CorrespondenceSet& c, const std::vector<int>& idx) {
  CorrespondenceSet out;
  out.granularity = c.granularity;
  for (int k : idx) out.add(c.pairs[k].first, c.pairs[k].second, c.confidence[k]);
  return out;
}

std::vector<int> inlier_indices(const RigidTransform& t, const CorrespondenceSet& c,
                                const PointCloud& src, const PointCloud& tgt,
                                double threshold) {
  std::vector<int> idx;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double d =
        (t * src.points[c.pairs[k].first] - tgt.points[c.pairs[k].second]).norm();
    if (d < threshold) idx.push_back(static_cast<int>(k));
  }
  return idx;
}

}  // namespace

InlierStats inlier_stats(const RigidTransform& t, const CorrespondenceSet& c,
                         const PointCloud& src, const PointCloud& tgt,
                         double threshold) {
  InlierStats s;
  double sum = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double d =
        (t * src.points[c.pairs[k].first] - tgt.points[c.pairs[k].second]).norm();
    if (d < threshold) {
      ++s.count;
      sum += d;
    }
  }
  s.mean_residual = s.count > 0 ? sum / s.count : 0.0;
  return s;
}

PoseEstimate weighted_svd(const CorrespondenceSet& c, const PointCloud& src,
                          const PointCloud& tgt) {
  if (c.size() < 3) throw std::invalid_argument("underdetermined");
  c.validate(src.size(), tgt.size());
  PoseEstimate est;
  est.transform = fit_weighted(c, src, tgt);
  est.inlier_count = static_cast<int>(c.size());
  est.mean_residual = weighted_mean_residual(est.transform, c, src, tgt);
  return est;
}

PoseEstimate ransac(const CorrespondenceSet& c, const PointCloud& src,
                    const PointCloud& tgt, const EstimatorConfig& cfg) {
  cfg.validate();
  if (c.size() < 3) throw std::invalid_argument("underdetermined");
  c.validate(src.size(), tgt.size());
  const int n = static_cast<int>(c.size());
  const int sample = cfg.ransac_sample_size;

  RigidTransform best;
  int best_count = 0;
  for (int it = 0; it < cfg.ransac_iterations; ++it) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(it)));
    std::vector<int> pick;
    pick.reserve(sample);
    while (static_cast<int>(pick.size()) < sample) {
      const int i = rng.uniform_int(n);
      if (std::find(pick.begin(), pick.end(), i) == pick.end()) pick.push_back(i);
    }
    CorrespondenceSet minimal = subset(c, pick);
    std::fill(minimal.confidence.begin(), minimal.confidence.end(), 1.0);
    RigidTransform model;
    try {
      model = fit_weighted(minimal, src, tgt);
    } catch (const std::invalid_argument&) {
      continue;  // collinear sample
    }
    const int count =
        inlier_stats(model, c, src, tgt, cfg.ransac_inlier_threshold).count;
    if (count > best_count) {
      best_count = count;
      best = model;
    }
  }
  if (best_count < 3) throw std::runtime_error("no consensus");

  const std::vector<int> idx =
      inlier_indices(best, c, src, tgt, cfg.ransac_inlier_threshold);
  PoseEstimate est;
  est.transform = best;
  try {
    est.transform = fit_weighted(subset(c, idx), src, tgt);
  } catch (const std::invalid_argument&) {
    // refit degenerate; keep the minimal model
  }
  const InlierStats s = inlier_stats(est.transform, c, src, tgt, cfg.ransac_inlier_threshold);
  est.inlier_count = s.count;
  est.mean_residual = s.mean_residual;
  return est;
}

PoseEstimate lgr(const std::vector<CorrespondenceSet>& groups,
                 const CorrespondenceSet& c_star, const PointCloud& src,
                 const PointCloud& tgt, const EstimatorConfig& cfg) {
  cfg.validate();
  c_star.validate(src.size(), tgt.size());

  // Local phase: one candidate per group with enough support.
  RigidTransform best;
  InlierStats best_stats;
  bool have_candidate = false;
  for (const CorrespondenceSet& g : groups) {
    if (g.size() < 3) continue;
    RigidTransform candidate;
    try {
      candidate = fit_weighted(g, src, tgt);
    } catch (const std::invalid_argument&) {
      continue;
    }
    const InlierStats s = inlier_stats(candidate, c_star, src, tgt, cfg.lgr_inlier_threshold);
    if (!have_candidate || s.count > best_stats.count) {
      best = candidate;
      best_stats = s;
      have_candidate = true;
    }
  }
  if (!have_candidate) throw std::runtime_error("no group with enough correspondences");

  // Global refinement: refit on the current inliers, keep the refit only while
  // the mean residual does not increase.
  for (int it = 0; it < cfg.lgr_refine_iterations; ++it) {
    const std::vector<int> idx =
        inlier_indices(best, c_star, src, tgt, cfg.lgr_inlier_threshold);
    if (static_cast<int>(idx.size()) < 3) break;
    RigidTransform refit;
    try {
      refit = fit_weighted(subset(c_star, idx), src, tgt);
    } catch (const std::invalid_argument&) {
      break;
    }
    const InlierStats s = inlier_stats(refit, c_star, src, tgt, cfg.lgr_inlier_threshold);
    if (s.count == 0 || s.mean_residual > best_stats.mean_residual) break;
    best = refit;
    best_stats = s;
  }

  PoseEstimate est;
  est.transform = best;
  est.inlier_count = best_stats.count;
  est.mean_residual = best_stats.mean_residual;
  return est;
}

}  // namespace crossreg::est
