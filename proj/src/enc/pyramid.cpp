#include "crossreg/enc/pyramid.hpp"

#include "crossreg/common/mathutil.hpp"
#include "crossreg/core/search.hpp"
#include "crossreg/core/voxel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crossreg::enc {

namespace {

constexpr double kBiasChannel = 0.5;
constexpr double kDensityWeight = 0.25;
// Height is measured above a robust ground estimate at a fixed scale so the
// channel is comparable across sensors with different vertical reach.
constexpr double kHeightScale = 8.0;

double ground_estimate(const PointCloud& support) {
  std::vector<double> z;
  z.reserve(support.size());
  for (const Vec3& p : support.points) z.push_back(p.z());
  const std::size_t k = z.size() / 20;  // 5th percentile
  std::nth_element(z.begin(), z.begin() + k, z.end());
  return z[k];
}

}  // namespace

void EncoderConfig::validate() const {
  if (level_voxels.empty()) throw std::invalid_argument("encoder needs at least one level");
  for (std::size_t i = 0; i < level_voxels.size(); ++i) {
    if (!(level_voxels[i] > 0.0)) throw std::invalid_argument("level voxel sizes must be positive");
    if (i > 0 && level_voxels[i] <= level_voxels[i - 1]) {
      throw std::invalid_argument("level voxel sizes must be strictly increasing");
    }
  }
  if (radius_multipliers.empty()) throw std::invalid_argument("descriptor radii missing");
  if (dense_dim < 8 || super_dim < 8 || unified_dim < 8) {
    throw std::invalid_argument("feature dims must be at least 8");
  }
  if (image_depths < 1) throw std::invalid_argument("image depths must be positive");
}

MatX compute_descriptors(const std::vector<Vec3>& positions, const PointCloud& support,
                         const std::vector<double>& radii, int dim) {
  if (support.empty()) throw std::invalid_argument("empty descriptor support cloud");
  const int n = static_cast<int>(positions.size());
  const int r_count = static_cast<int>(radii.size());
  const int channels = 1 + 5 * r_count + 1;
  if (channels > dim) throw std::invalid_argument("descriptor dim too small for channel count");

  const double ground_z = ground_estimate(support);

  const double min_radius = *std::min_element(radii.begin(), radii.end());
  GridIndex index(support, std::max(0.05, min_radius));

  MatX raw = MatX::Zero(n, channels);
  for (int i = 0; i < n; ++i) {
    const Vec3& x = positions[i];
    raw(i, 0) = kBiasChannel;
    for (int k = 0; k < r_count; ++k) {
      const std::vector<int> nb = index.radius_indices(x, radii[k]);
      const int base = 1 + 5 * k;
      raw(i, base + 4) = std::log(1.0 + static_cast<double>(nb.size()));
      if (nb.size() >= 3) {
        Vec3 mean = Vec3::Zero();
        for (int j : nb) mean += support.points[j];
        mean /= static_cast<double>(nb.size());
        Mat3 cov = Mat3::Zero();
        for (int j : nb) {
          const Vec3 d = support.points[j] - mean;
          cov += d * d.transpose();
        }
        cov /= static_cast<double>(nb.size());
        Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        const Vec3 ev = eig.eigenvalues();  // ascending
        const double e1 = ev[2], e2 = ev[1], e3 = ev[0];
        if (e1 > 1e-12) {
          raw(i, base + 0) = (e1 - e2) / e1;  // linearity
          raw(i, base + 1) = (e2 - e3) / e1;  // planarity
          raw(i, base + 2) = e3 / e1;         // sphericity
          raw(i, base + 3) = std::abs(eig.eigenvectors().col(0).z());  // verticality
        }
      }
    }
    raw(i, channels - 1) = std::clamp((x.z() - ground_z) / kHeightScale, -0.25, 1.5);
  }

  // Standardize the log-density channels per set; raw neighbor counts differ
  // strongly across scan patterns, relative density is the comparable signal.
  for (int k = 0; k < r_count; ++k) {
    const int col = 1 + 5 * k + 4;
    const double mean = raw.col(col).mean();
    const double var = (raw.col(col).array() - mean).square().mean();
    const double inv = 1.0 / std::sqrt(std::max(var, 1e-12));
    raw.col(col) = ((raw.col(col).array() - mean) * inv * kDensityWeight).matrix();
  }

  MatX out = MatX::Zero(n, dim);
  out.leftCols(channels) = raw;
  l2_normalize_rows(out);
  return out;
}

FeaturePyramid encode_point_pyramid(const PointCloud& c, const EncoderConfig& cfg) {
  cfg.validate();
  FeaturePyramid pyr;

  PointCloud level0 = voxel_downsample(c, cfg.level_voxels[0]);
  if (level0.size() < 16) throw std::invalid_argument("degenerate cloud");

  std::vector<PointCloud> level_points;
  std::vector<double> level_voxels;
  level_points.push_back(std::move(level0));
  level_voxels.push_back(cfg.level_voxels[0]);
  for (std::size_t l = 1; l < cfg.level_voxels.size(); ++l) {
    PointCloud next = voxel_downsample(level_points.back(), cfg.level_voxels[l]);
    if (next.size() >= level_points.back().size()) continue;  // no shrink, skip level
    if (next.size() < 4) break;
    level_points.push_back(std::move(next));
    level_voxels.push_back(cfg.level_voxels[l]);
  }

  const PointCloud& support = level_points.front();
  for (std::size_t l = 0; l < level_points.size(); ++l) {
    PyramidLevel level;
    level.voxel = level_voxels[l];
    std::vector<double> radii;
    for (double m : cfg.radius_multipliers) radii.push_back(m * level_voxels[l]);
    const int dim = l == 0 ? cfg.dense_dim : cfg.super_dim;
    level.features = compute_descriptors(level_points[l].points, support, radii, dim);
    pyr.levels.push_back(std::move(level));
  }
  for (std::size_t l = 0; l < level_points.size(); ++l) {
    pyr.levels[l].points = std::move(level_points[l]);
  }
  return pyr;
}

}  // namespace crossreg::enc
