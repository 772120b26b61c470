#pragma once

#include "crossreg/core/types.hpp"

#include <vector>

namespace crossreg::enc {

struct EncoderConfig {
  std::vector<double> level_voxels = {0.25, 0.5, 1.0, 2.0};  // strictly increasing
  std::vector<double> radius_multipliers = {2.0, 4.0};       // x level voxel size
  int dense_dim = 32;    // densest level
  int super_dim = 64;    // coarsest level (and intermediates)
  int image_depths = 3;  // box-filter scales 1, 2, 4, ...
  int unified_dim = 64;  // image feature dim

  void validate() const;
};

struct PyramidLevel {
  PointCloud points;
  MatX features;  // |points| x dim, rows L2-normalized
  double voxel = 0.0;
};

/// Multi-level voxel pyramid: levels[0] is the densest, levels.back() the
/// superpoints. Point counts strictly decrease toward the coarse end.
struct FeaturePyramid {
  std::vector<PyramidLevel> levels;

  const PyramidLevel& dense() const { return levels.front(); }
  const PyramidLevel& coarse() const { return levels.back(); }
};

/// Handcrafted geometric descriptors at `positions`, supported by neighborhoods
/// of `support` (radius queries at each of `radii`): per radius the covariance
/// eigen-features (linearity, planarity, sphericity), normal verticality and a
/// per-set standardized log density, plus normalized height and a constant
/// channel. Zero-padded to `dim` and L2-normalized per row.
MatX compute_descriptors(const std::vector<Vec3>& positions, const PointCloud& support,
                         const std::vector<double>& radii, int dim);

/// Builds the pyramid: level 0 is voxel_downsample(c, level_voxels[0]); each
/// coarser level re-voxels the previous one (levels that fail to shrink are
/// skipped). Features of every level are computed against level-0 support.
/// Throws "degenerate cloud" when fewer than 16 points survive level 0.
FeaturePyramid encode_point_pyramid(const PointCloud& c, const EncoderConfig& cfg);

}  // namespace crossreg::enc
