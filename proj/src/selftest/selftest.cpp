#include "crossreg/selftest/selftest.hpp"

#include "crossreg/common/mathutil.hpp"
#include "crossreg/common/rng.hpp"
#include "crossreg/core/metrics.hpp"
#include "crossreg/core/search.hpp"
#include "crossreg/core/transform.hpp"
#include "crossreg/core/voxel.hpp"
#include "crossreg/est/estimators.hpp"
#include "crossreg/loss/focal.hpp"
#include "crossreg/match/densematch.hpp"
#include "crossreg/omp/omp.hpp"
#include "crossreg/vgam/vgam.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace crossreg::selftest {

namespace {

bool fault_injected(const std::string& name) {
  const char* env = std::getenv("CROSSREG_SELFTEST_FAULT");
  return env && name == env;
}

RigidTransform random_transform(Rng& rng) {
  RigidTransform t;
  t.rotation = (Eigen::AngleAxisd(rng.uniform(-std::numbers::pi, std::numbers::pi), Vec3::UnitZ()) *
                Eigen::AngleAxisd(rng.uniform(-1.0, 1.0), Vec3::UnitY()) *
                Eigen::AngleAxisd(rng.uniform(-1.0, 1.0), Vec3::UnitX()))
                   .toRotationMatrix();
  t.translation = Vec3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
  return t;
}

MatX random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  MatX m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.normal(0.0, scale);
  }
  return m;
}

CheckResult check_sinkhorn_marginals() {
  CheckResult result{"sinkhorn_marginals", true, ""};
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    MatX s = random_matrix(rng, 8, 8);
    if (fault_injected(result.name)) s(0, 0) = std::numeric_limits<double>::quiet_NaN();
    try {
      const MatX p = match::sinkhorn(match::augment_slack(s, 1.0), 100);
      worst = std::max(worst, match::marginal_deviation(p));
    } catch (const std::exception& e) {
      result.passed = false;
      result.detail = e.what();
      return result;
    }
  }
  result.passed = worst <= 1e-6;
  std::ostringstream os;
  os << "max marginal deviation " << worst;
  result.detail = os.str();
  return result;
}

CheckResult check_svd_recovery() {
  CheckResult result{"svd_recovery", true, ""};
  Rng rng(102);
  double worst_rre = 0.0, worst_rte = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    PointCloud src;
    for (int i = 0; i < 30; ++i) {
      src.points.emplace_back(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    }
    RigidTransform gt = random_transform(rng);
    if (fault_injected(result.name)) gt.translation.x() += 1e-3;
    const PointCloud tgt = apply_transform(gt, src);
    CorrespondenceSet c;
    for (int i = 0; i < 30; ++i) c.add(i, i);
    const est::PoseEstimate est = est::weighted_svd(c, src, tgt);
    worst_rre = std::max(worst_rre, rre(est.transform.rotation, gt.rotation));
    worst_rte = std::max(worst_rte, rte(est.transform.translation, gt.translation));
  }
  result.passed = worst_rre < 1e-7 && worst_rte < 1e-9;
  std::ostringstream os;
  os << "worst rre " << worst_rre << " deg, worst rte " << worst_rte << " m";
  result.detail = os.str();
  return result;
}

CheckResult check_focal_gradient() {
  CheckResult result{"focal_gradient", true, ""};
  Rng rng(103);
  loss::LossConfig cfg;
  double worst = 0.0;
  for (int trial = 0; trial < 16; ++trial) {
    VecX p(4);
    omp::OverlapMask m(4);
    for (int i = 0; i < 4; ++i) {
      p[i] = rng.uniform(0.02, 0.98);
      m[i] = rng.uniform() < 0.5 ? 0 : 1;
    }
    const VecX grad = loss::focal_loss_gradient(p, m, cfg);
    const double h = 1e-5;
    for (int i = 0; i < 4; ++i) {
      VecX lo = p, hi = p;
      lo[i] -= h;
      hi[i] += h;
      double fd = (loss::focal_mask_loss(hi, m, cfg).loss -
                   loss::focal_mask_loss(lo, m, cfg).loss) /
                  (2 * h);
      if (fault_injected(result.name)) fd += 1e-2;
      const double rel = std::abs(grad[i] - fd) / std::max(1e-12, std::abs(fd));
      worst = std::max(worst, rel);
    }
  }
  result.passed = worst <= 1e-5;
  std::ostringstream os;
  os << "worst relative error " << worst;
  result.detail = os.str();
  return result;
}

CheckResult check_nearest_neighbor_oracle() {
  CheckResult result{"nearest_neighbor_oracle", true, ""};
  Rng rng(104);
  PointCloud c;
  for (int i = 0; i < 600; ++i) {
    c.points.emplace_back(rng.uniform(-8, 8), rng.uniform(-8, 8), rng.uniform(-8, 8));
  }
  GridIndex index(c, 1.0);
  for (int q = 0; q < 200; ++q) {
    Vec3 query(rng.uniform(-9, 9), rng.uniform(-9, 9), rng.uniform(-9, 9));
    const auto brute = nearest_neighbor(query, c);
    auto fast = index.nearest(query);
    if (fault_injected(result.name)) fast.index += 1;
    if (fast.index != brute.index) {
      result.passed = false;
      result.detail = "grid index disagrees with the exhaustive scan";
      return result;
    }
  }
  result.detail = "200 queries agree";
  return result;
}

CheckResult check_grouping_oracle() {
  CheckResult result{"grouping_oracle", true, ""};
  Rng rng(105);
  PointCloud dense, supers;
  for (int i = 0; i < 400; ++i) {
    dense.points.emplace_back(rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(-6, 6));
  }
  for (int i = 0; i < 80; ++i) {
    supers.points.emplace_back(rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(-6, 6));
  }
  auto assign = point_to_node_group(dense, supers);
  if (fault_injected(result.name)) assign[0] = (assign[0] + 1) % 80;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (assign[i] != nearest_neighbor(dense.points[i], supers).index) {
      result.passed = false;
      result.detail = "grouping disagrees with the exhaustive scan";
      return result;
    }
  }
  result.detail = "assignment matches on 400 points";
  return result;
}

CheckResult check_attention_rows() {
  CheckResult result{"attention_row_sums", true, ""};
  Rng rng(106);
  const int d = 16;
  auto w = omp::OmpWeights::default_weights(d, d, d, 4);
  w.w_q = random_matrix(rng, d, d, 0.3);
  w.w_k = random_matrix(rng, d, d, 0.3);
  const MatX q = random_matrix(rng, 6, d);
  const MatX kv = random_matrix(rng, 9, d);
  std::vector<MatX> scores;
  omp::fuse(q, kv, w, &scores);
  double worst = 0.0;
  for (const MatX& s : scores) {
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      double sum = s.row(i).sum();
      if (fault_injected(result.name)) sum += 1e-3;
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  auto vw = vgam::VgamWeights::default_weights(d);
  MatX self_scores;
  vgam::self_attention(q, vw, &self_scores);
  for (Eigen::Index i = 0; i < self_scores.rows(); ++i) {
    worst = std::max(worst, std::abs(self_scores.row(i).sum() - 1.0));
  }
  result.passed = worst <= 1e-6;
  std::ostringstream os;
  os << "max row-sum deviation " << worst;
  result.detail = os.str();
  return result;
}

CheckResult check_geo_attention_invariance() {
  CheckResult result{"geo_attention_invariance", true, ""};
  Rng rng(107);
  const int d = 16;
  const auto w = vgam::VgamWeights::default_weights(d);
  const MatX f = random_matrix(rng, 8, d);
  std::vector<Vec3> pos;
  for (int i = 0; i < 8; ++i) {
    pos.emplace_back(rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4));
  }
  const MatX base = vgam::geometric_self_attention(f, pos, w);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const RigidTransform t = random_transform(rng);
    std::vector<Vec3> moved;
    for (const Vec3& p : pos) moved.push_back(t * p);
    MatX out = vgam::geometric_self_attention(f, moved, w);
    if (fault_injected(result.name)) out(0, 0) += 1e-6;
    worst = std::max(worst, (out - base).cwiseAbs().maxCoeff());
  }
  result.passed = worst <= 1e-9;
  std::ostringstream os;
  os << "max output change " << worst;
  result.detail = os.str();
  return result;
}

CheckResult check_voxel_idempotence() {
  CheckResult result{"voxel_idempotence", true, ""};
  Rng rng(108);
  PointCloud c;
  for (int i = 0; i < 1500; ++i) {
    c.points.emplace_back(rng.uniform(-7, 7), rng.uniform(-7, 7), rng.uniform(-7, 7));
  }
  for (double voxel : {0.3, 0.7, 1.3}) {
    const PointCloud once = voxel_downsample(c, voxel);
    PointCloud twice = voxel_downsample(once, voxel);
    if (fault_injected(result.name) && !twice.points.empty()) twice.points.pop_back();
    if (twice.size() != once.size()) {
      result.passed = false;
      result.detail = "re-downsampling changed the cloud";
      return result;
    }
    for (std::size_t i = 0; i < once.size(); ++i) {
      if ((once.points[i] - twice.points[i]).norm() > 1e-12) {
        result.passed = false;
        result.detail = "re-downsampling moved a centroid";
        return result;
      }
    }
  }
  result.detail = "idempotent at 3 voxel sizes";
  return result;
}

CheckResult check_dual_normalize() {
  CheckResult result{"dual_normalize_uniform", true, ""};
  MatX z = MatX::Constant(4, 6, 0.37);
  if (fault_injected(result.name)) z(0, 0) += 0.5;
  const MatX out = vgam::dual_normalize(z);
  const double expect = 1.0 / (4.0 * 6.0);
  const double worst = (out.array() - expect).abs().maxCoeff();
  result.passed = worst <= 1e-12;
  std::ostringstream os;
  os << "max deviation from uniform " << worst;
  result.detail = os.str();
  return result;
}

}  // namespace

std::vector<CheckResult> run_selftest() {
  return {
      check_sinkhorn_marginals(), check_svd_recovery(),       check_focal_gradient(),
      check_nearest_neighbor_oracle(), check_grouping_oracle(), check_attention_rows(),
      check_geo_attention_invariance(), check_voxel_idempotence(), check_dual_normalize(),
  };
}

}  // namespace crossreg::selftest
