#pragma once

#include "crossreg/core/types.hpp"
#include "crossreg/sim/scene.hpp"

namespace crossreg::sim {

/// Spinning mechanical lidar: one ray per (beam elevation x azimuth step).
/// Over flat ground the returns form concentric rings.
struct RingLidarSpec {
  int beams = 64;
  double elev_min_deg = -24.0;
  double elev_max_deg = 2.0;
  double azimuth_res_deg = 0.6;
  double max_range = 40.0;
  RigidTransform pose;

  void validate() const;
};

/// Semi-solid-state lidar: rays sweep a rose curve in (azimuth, elevation)
/// space, confined to the field of view and densest toward the center.
struct FanLidarSpec {
  double hfov_deg = 70.0;
  double vfov_deg = 70.0;
  int petals = 7;
  double angular_rate = 0.02399963229728653;  // radians of curve parameter per sample
  int samples = 30000;
  double max_range = 40.0;
  RigidTransform pose;

  void validate() const;
};

/// World-frame returns in scan order (beam-major).
PointCloud sample_ring_lidar(const SceneModel& scene, const RingLidarSpec& spec);

/// World-frame returns in sample order.
PointCloud sample_fan_lidar(const SceneModel& scene, const FanLidarSpec& spec);

/// Direction for azimuth/elevation in the sensor frame (+x forward, +z up).
Vec3 az_el_direction(double azimuth_rad, double elevation_rad);

}  // namespace crossreg::sim
