#pragma once

#include "crossreg/core/types.hpp"

namespace crossreg {

/// Voxel-grid downsampling: one centroid per occupied voxel, output sorted by
/// voxel lattice index (x, then y, then z). Intensities, when present, are
/// averaged per voxel.
PointCloud voxel_downsample(const PointCloud& c, double voxel);

}  // namespace crossreg
