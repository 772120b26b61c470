#include "crossreg/sim/pair.hpp"

#include "crossreg/common/mathutil.hpp"
#include "crossreg/common/rng.hpp"
#include "crossreg/core/search.hpp"
#include "crossreg/core/transform.hpp"

#include <cmath>
#include <stdexcept>

namespace crossreg::sim {

namespace {

bool inside_obstacle(const SceneModel& scene, const Vec3& p) {
  for (const Surface& s : scene.surfaces) {
    if (const Box* b = std::get_if<Box>(&s)) {
      if (((p - b->center).cwiseAbs().array() < b->half.array() * 1.2).all()) return true;
    } else if (const Cylinder* c = std::get_if<Cylinder>(&s)) {
      const double dx = p.x() - c->base.x();
      const double dy = p.y() - c->base.y();
      if (dx * dx + dy * dy < 1.44 * c->radius * c->radius && p.z() > c->base.z() &&
          p.z() < c->base.z() + c->height) {
        return true;
      }
    }
  }
  return false;
}

RigidTransform yaw_pose(const Vec3& position, double yaw_rad) {
  RigidTransform t;
  t.rotation = Eigen::AngleAxisd(yaw_rad, Vec3::UnitZ()).toRotationMatrix();
  t.translation = position;
  return t;
}

Vec3 sample_clear_position(const SceneModel& scene, Rng& rng, double extent, double z) {
  for (int tries = 0; tries < 32; ++tries) {
    const Vec3 p(rng.uniform(-extent, extent), rng.uniform(-extent, extent), z);
    if (!inside_obstacle(scene, p)) return p;
  }
  return Vec3(0.0, 0.0, z);
}

}  // namespace

double overlap_estimate(const PointCloud& source, const PointCloud& target,
                        const RigidTransform& gt, double radius) {
  if (source.empty() || target.empty()) return 0.0;
  if (!(radius > 0.0)) throw std::invalid_argument("overlap radius must be positive");
  GridIndex index(target, radius);
  std::size_t hits = 0;
  for (const Vec3& p : source.points) {
    if (index.has_neighbor_within(gt * p, radius)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(source.size());
}

ScenePair make_pair(const SceneModel& scene, const PairGenConfig& cfg,
                    const RigidTransform& gt) {
  scene.validate();
  gt.validate();
  if (!(cfg.overlap_min > 0.0) || !(cfg.overlap_max <= 1.0) ||
      cfg.overlap_min > cfg.overlap_max) {
    throw std::invalid_argument("overlap target range must lie within (0, 1]");
  }

  Vec3 lo, hi;
  scene_bounds(scene, lo, hi);
  const double extent = 0.55 * std::max(hi.x() - lo.x(), hi.y() - lo.y()) / 1.4;
  const RigidTransform gt_inv = gt.inverse();

  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    Rng rng(mix_seed(cfg.seed, 0x7000 + static_cast<std::uint64_t>(attempt)));
    RingLidarSpec ring = cfg.ring;
    FanLidarSpec fan = cfg.fan;
    if (attempt > 0) {
      const Vec3 fan_pos =
          sample_clear_position(scene, rng, extent, cfg.fan.pose.translation.z());
      const double fan_yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
      fan.pose = yaw_pose(fan_pos, fan_yaw);
      const double bearing = rng.uniform(-std::numbers::pi, std::numbers::pi);
      const double dist = rng.uniform(2.0, 9.0);
      Vec3 ring_pos = fan_pos + dist * Vec3(std::cos(bearing), std::sin(bearing), 0.0);
      ring_pos.z() = cfg.ring.pose.translation.z();
      if (inside_obstacle(scene, ring_pos)) continue;
      ring.pose = yaw_pose(ring_pos, rng.uniform(-std::numbers::pi, std::numbers::pi));
    }

    const PointCloud fan_world = sample_fan_lidar(scene, fan);
    const PointCloud ring_world = sample_ring_lidar(scene, ring);
    if (fan_world.size() < cfg.min_points || ring_world.size() < cfg.min_points) continue;

    DegradationSpec src_deg = cfg.degradation;
    src_deg.seed = mix_seed(cfg.seed, 0x8000 + static_cast<std::uint64_t>(attempt) * 2);
    DegradationSpec tgt_deg = cfg.degradation;
    tgt_deg.seed = mix_seed(cfg.seed, 0x8001 + static_cast<std::uint64_t>(attempt) * 2);

    ScenePair pair;
    pair.gt = gt;
    pair.target = degrade(ring_world, tgt_deg);
    pair.source = apply_transform(gt_inv, degrade(fan_world, src_deg));
    pair.overlap = overlap_estimate(pair.source, pair.target, gt, cfg.overlap_radius);
    if (pair.overlap < cfg.overlap_min || pair.overlap > cfg.overlap_max) continue;

    // Camera roughly midway between the sensors, jittered, then discarded.
    const Vec3 mid = 0.5 * (fan.pose.translation + ring.pose.translation);
    const Vec3 cam_pos = mid + Vec3(rng.normal(0.0, 0.3), rng.normal(0.0, 0.3),
                                    rng.normal(0.2, 0.1));
    const double fan_yaw = std::atan2(fan.pose.rotation(1, 0), fan.pose.rotation(0, 0));
    const double cam_yaw = fan_yaw + rng.normal(0.0, deg2rad(4.0));
    const double cam_pitch = deg2rad(8.0) + rng.normal(0.0, deg2rad(2.0));
    RigidTransform cam;
    cam.rotation = (Eigen::AngleAxisd(cam_yaw, Vec3::UnitZ()) *
                    Eigen::AngleAxisd(cam_pitch, Vec3::UnitY()))
                       .toRotationMatrix();
    cam.translation = cam_pos;
    pair.image = render_view_image(scene, cam, cfg.camera, cfg.image_height, cfg.image_width);
    return pair;
  }
  throw std::runtime_error("overlap target unreachable");
}

SuiteParams standard_suite() { return SuiteParams{}; }

SuitePairSpec suite_pair_spec(const SuiteParams& params, int k) {
  SuitePairSpec spec;
  const std::uint64_t pair_seed = mix_seed(params.seed, static_cast<std::uint64_t>(k));
  Rng rng(mix_seed(pair_seed, 0xab));

  spec.scene = random_scene(mix_seed(pair_seed, 0x5c), 16.0,
                            8 + rng.uniform_int(6), 3 + rng.uniform_int(4));

  spec.config.seed = pair_seed;
  spec.config.degradation.noise_sigma = params.noise_sigma;
  spec.config.degradation.outlier_fraction = params.outlier_fraction;
  spec.config.degradation.dropout_fraction = params.dropout_fraction;
  spec.config.overlap_min = params.overlap_min;
  spec.config.overlap_max = params.overlap_max;
  spec.config.fan.pose = yaw_pose(Vec3(rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0),
                                       rng.uniform(1.5, 2.0)),
                                  rng.uniform(-std::numbers::pi, std::numbers::pi));
  spec.config.ring.pose = yaw_pose(
      spec.config.fan.pose.translation +
          Vec3(rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0), rng.uniform(-0.2, 0.4)),
      rng.uniform(-std::numbers::pi, std::numbers::pi));

  const double yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
  const double roll = rng.uniform(-deg2rad(3.0), deg2rad(3.0));
  const double pitch = rng.uniform(-deg2rad(3.0), deg2rad(3.0));
  spec.gt.rotation = (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                      Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                      Eigen::AngleAxisd(roll, Vec3::UnitX()))
                         .toRotationMatrix();
  spec.gt.translation =
      Vec3(rng.uniform(-8.0, 8.0), rng.uniform(-8.0, 8.0), rng.uniform(-0.5, 0.5));
  return spec;
}

}  // namespace crossreg::sim
