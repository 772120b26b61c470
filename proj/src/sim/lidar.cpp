#include "crossreg/sim/lidar.hpp"

#include "crossreg/common/mathutil.hpp"

#include <cmath>
#include <stdexcept>

namespace crossreg::sim {

void RingLidarSpec::validate() const {
  if (beams < 1) throw std::invalid_argument("ring lidar needs at least one beam");
  if (!(max_range > 0.0)) throw std::invalid_argument("ring lidar max range must be positive");
  if (!(azimuth_res_deg > 0.0)) throw std::invalid_argument("azimuth resolution must be positive");
  if (elev_max_deg < elev_min_deg) throw std::invalid_argument("inverted elevation range");
  pose.validate();
}

void FanLidarSpec::validate() const {
  if (!(hfov_deg > 0.0 && hfov_deg < 180.0) || !(vfov_deg > 0.0 && vfov_deg < 180.0)) {
    throw std::invalid_argument("fan lidar fov must be in (0, 180) degrees");
  }
  if (samples < 1) throw std::invalid_argument("fan lidar needs at least one sample");
  if (!(max_range > 0.0)) throw std::invalid_argument("fan lidar max range must be positive");
  if (petals < 1) throw std::invalid_argument("fan lidar petal count must be positive");
  pose.validate();
}

Vec3 az_el_direction(double azimuth_rad, double elevation_rad) {
  const double ce = std::cos(elevation_rad);
  return {ce * std::cos(azimuth_rad), ce * std::sin(azimuth_rad), std::sin(elevation_rad)};
}

PointCloud sample_ring_lidar(const SceneModel& scene, const RingLidarSpec& spec) {
  spec.validate();
  PointCloud out;
  const int steps = std::max(1, static_cast<int>(std::llround(360.0 / spec.azimuth_res_deg)));
  out.points.reserve(static_cast<std::size_t>(spec.beams) * steps / 2);
  for (int b = 0; b < spec.beams; ++b) {
    const double f = spec.beams == 1 ? 0.0 : static_cast<double>(b) / (spec.beams - 1);
    const double elev = deg2rad(spec.elev_min_deg + f * (spec.elev_max_deg - spec.elev_min_deg));
    for (int s = 0; s < steps; ++s) {
      const double az = deg2rad(static_cast<double>(s) * spec.azimuth_res_deg);
      const Vec3 dir = spec.pose.rotation * az_el_direction(az, elev);
      if (auto hit = raycast(scene, spec.pose.translation, dir, spec.max_range)) {
        out.points.push_back(hit->point);
      }
    }
  }
  return out;
}

PointCloud sample_fan_lidar(const SceneModel& scene, const FanLidarSpec& spec) {
  spec.validate();
  PointCloud out;
  out.points.reserve(static_cast<std::size_t>(spec.samples) / 2);
  const double half_h = deg2rad(spec.hfov_deg) / 2.0;
  const double half_v = deg2rad(spec.vfov_deg) / 2.0;
  for (int s = 0; s < spec.samples; ++s) {
    const double theta = spec.angular_rate * static_cast<double>(s);
    const double r = std::sin(spec.petals * theta);  // rose curve, |r| <= 1
    const double az = r * std::cos(theta) * half_h;
    const double el = r * std::sin(theta) * half_v;
    const Vec3 dir = spec.pose.rotation * az_el_direction(az, el);
    if (auto hit = raycast(scene, spec.pose.translation, dir, spec.max_range)) {
      out.points.push_back(hit->point);
    }
  }
  return out;
}

}  // namespace crossreg::sim
