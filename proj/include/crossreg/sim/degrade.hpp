#pragma once

#include "crossreg/core/types.hpp"

#include <cstdint>

namespace crossreg::sim {

struct Aabb {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  bool empty() const { return (hi - lo).minCoeff() <= 0.0; }
};

struct DegradationSpec {
  double noise_sigma = 0.0;      // isotropic Gaussian, meters
  double outlier_fraction = 0.0; // in [0, 1]
  Aabb outlier_volume;           // defaults to the input bounds when empty
  double dropout_fraction = 0.0; // in [0, 1]
  std::uint64_t seed = 0;

  void validate() const;
};

/// Applies, in order: Gaussian perturbation, outlier replacement
/// (round(fraction * n) points resampled uniformly in the outlier volume),
/// then dropout (round(fraction * n) points removed). Deterministic in the seed.
PointCloud degrade(const PointCloud& c, const DegradationSpec& d);

}  // namespace crossreg::sim
