#pragma once

#include "crossreg/core/types.hpp"
#include "crossreg/sim/degrade.hpp"
#include "crossreg/sim/image.hpp"
#include "crossreg/sim/lidar.hpp"
#include "crossreg/sim/scene.hpp"

#include <cstdint>

namespace crossreg::sim {

/// One synthetic registration problem. The source scan lives in its own frame;
/// gt maps source coordinates into the target frame. The camera pose used for
/// the image is intentionally discarded.
struct ScenePair {
  PointCloud source;  // fan lidar
  PointCloud target;  // ring lidar
  ViewImage image;
  RigidTransform gt;
  double overlap = 0.0;
};

struct PairGenConfig {
  RingLidarSpec ring;
  FanLidarSpec fan;
  DegradationSpec degradation;
  double overlap_min = 0.4;
  double overlap_max = 0.9;
  double overlap_radius = 0.5;  // 2 x pipeline voxel size
  int max_retries = 40;
  int image_height = 64;
  int image_width = 96;
  CameraIntrinsics camera;
  std::size_t min_points = 500;
  std::uint64_t seed = 0;
};

/// Fraction of source points with a target point strictly within `radius`
/// after mapping through gt.
double overlap_estimate(const PointCloud& source, const PointCloud& target,
                        const RigidTransform& gt, double radius);

/// Scans both sensors, degrades, frames the source by gt^-1 and renders the
/// view image. Attempt 0 uses the sensor poses as given in the specs; further
/// attempts resample both poses until the overlap estimate lands in
/// [overlap_min, overlap_max]. Throws "overlap target unreachable" once the
/// retry limit is hit.
ScenePair make_pair(const SceneModel& scene, const PairGenConfig& cfg,
                    const RigidTransform& gt);

/// Frozen parameters of the standard synthetic benchmark suite.
struct SuiteParams {
  int pair_count = 50;
  std::uint64_t seed = 74520831;
  double noise_sigma = 0.02;
  double outlier_fraction = 0.10;
  double dropout_fraction = 0.0;
  double overlap_min = 0.4;
  double overlap_max = 0.9;
};

SuiteParams standard_suite();

/// Scene + config + gt for pair `k` of a suite; deterministic in the seed.
struct SuitePairSpec {
  SceneModel scene;
  PairGenConfig config;
  RigidTransform gt;
};

SuitePairSpec suite_pair_spec(const SuiteParams& params, int k);

}  // namespace crossreg::sim
