#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crossreg/common/mathutil.hpp"
#include "crossreg/common/rng.hpp"
#include "crossreg/core/search.hpp"
#include "crossreg/core/transform.hpp"
#include "crossreg/core/voxel.hpp"
#include "crossreg/sim/pair.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

using namespace crossreg;
using namespace crossreg::sim;

namespace {

SceneModel wall_scene() {
  SceneModel scene;
  scene.surfaces.push_back(GroundPlane{0.0, 0.0, 0.0, 30.0, 30.0});
  // a loose room of walls around the origin plus some structure
  scene.surfaces.push_back(Box{Vec3(12.0, 0.0, 3.0), Vec3(0.3, 12.0, 3.0)});
  scene.surfaces.push_back(Box{Vec3(-12.0, 0.0, 3.0), Vec3(0.3, 12.0, 3.0)});
  scene.surfaces.push_back(Box{Vec3(0.0, 12.0, 3.0), Vec3(12.0, 0.3, 3.0)});
  scene.surfaces.push_back(Box{Vec3(0.0, -12.0, 3.0), Vec3(12.0, 0.3, 3.0)});
  scene.surfaces.push_back(Box{Vec3(4.0, 2.0, 1.0), Vec3(1.0, 1.5, 1.0)});
  scene.surfaces.push_back(Cylinder{Vec3(-3.0, 4.0, 0.0), 0.5, 4.0});
  return scene;
}

RigidTransform pose_at(double x, double y, double z, double yaw = 0.0) {
  RigidTransform t;
  t.rotation = axis_angle(Vec3::UnitZ(), yaw);
  t.translation = Vec3(x, y, z);
  return t;
}

}  // namespace

TEST_CASE("raycast analytic plane and cylinder") {
  SceneModel scene;
  scene.surfaces.push_back(Box{Vec3(6.0, 0.0, 0.0), Vec3(1.0, 10.0, 10.0)});  // face at x = 5
  auto hit = raycast(scene, Vec3::Zero(), Vec3::UnitX());
  REQUIRE(hit.has_value());
  CHECK(hit->range == doctest::Approx(5.0).epsilon(1e-12));
  CHECK((hit->point - Vec3(5.0, 0.0, 0.0)).norm() < 1e-9);

  CHECK_FALSE(raycast(scene, Vec3::Zero(), -Vec3::UnitX()).has_value());

  SceneModel cyl;
  cyl.surfaces.push_back(Cylinder{Vec3(3.0, 0.0, -5.0), 1.0, 10.0});
  auto chit = raycast(cyl, Vec3::Zero(), Vec3::UnitX());
  REQUIRE(chit.has_value());
  CHECK(chit->range == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(raycast(scene, Vec3::Zero(), Vec3(1.0, 1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("ring lidar over ground plane forms beam-count ring radii") {
  SceneModel ground;
  ground.surfaces.push_back(GroundPlane{0.0, 0.0, 0.0, 500.0, 500.0});
  RingLidarSpec spec;
  spec.beams = 64;
  spec.elev_min_deg = -30.0;
  spec.elev_max_deg = -2.0;
  spec.azimuth_res_deg = 2.0;
  spec.max_range = 100.0;
  spec.pose = pose_at(0, 0, 1.5);

  const PointCloud cloud = sample_ring_lidar(ground, spec);
  REQUIRE_FALSE(cloud.empty());

  std::set<long> expected;
  for (int b = 0; b < spec.beams; ++b) {
    const double f = static_cast<double>(b) / (spec.beams - 1);
    const double elev = deg2rad(spec.elev_min_deg + f * (spec.elev_max_deg - spec.elev_min_deg));
    const double range = 1.5 / std::sin(-elev);
    if (range <= spec.max_range) expected.insert(std::lround(1.5 / std::tan(-elev) * 1e6));
  }
  std::set<long> observed;
  for (const Vec3& p : cloud.points) {
    observed.insert(std::lround(std::hypot(p.x(), p.y()) * 1e6));
  }
  CHECK(observed.size() == expected.size());
  CHECK(observed.size() == 64);  // every beam reaches the ground within range
}

TEST_CASE("single ring beam against a wall stays at one height") {
  SceneModel scene;
  scene.surfaces.push_back(Box{Vec3(6.0, 0.0, 0.0), Vec3(0.5, 50.0, 50.0)});
  RingLidarSpec spec;
  spec.beams = 1;
  spec.elev_min_deg = 0.0;
  spec.elev_max_deg = 0.0;
  spec.azimuth_res_deg = 1.0;
  spec.pose = pose_at(0, 0, 2.0);
  const PointCloud cloud = sample_ring_lidar(scene, spec);
  REQUIRE_FALSE(cloud.empty());
  for (const Vec3& p : cloud.points) {
    CHECK(p.z() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(p.x() == doctest::Approx(5.5).epsilon(1e-9));  // wall face
  }
}

TEST_CASE("ring sampler with nothing in range returns empty") {
  SceneModel scene;
  scene.surfaces.push_back(Box{Vec3(1000.0, 0.0, 0.0), Vec3(1.0, 1.0, 1.0)});
  RingLidarSpec spec;
  spec.max_range = 10.0;
  spec.pose = pose_at(0, 0, 1.5);
  CHECK(sample_ring_lidar(scene, spec).empty());
}

TEST_CASE("fan lidar stays inside its field of view") {
  const SceneModel scene = wall_scene();
  FanLidarSpec spec;
  spec.hfov_deg = 70.0;
  spec.vfov_deg = 70.0;
  spec.samples = 20000;
  spec.pose = pose_at(0, 0, 1.7, 0.3);

  const PointCloud cloud = sample_fan_lidar(scene, spec);
  REQUIRE(cloud.size() > 1000);
  const Mat3 inv = spec.pose.rotation.transpose();
  for (const Vec3& p : cloud.points) {
    const Vec3 d = (inv * (p - spec.pose.translation)).normalized();
    const double az = std::atan2(d.y(), d.x());
    const double el = std::asin(std::clamp(d.z(), -1.0, 1.0));
    CHECK(std::abs(az) <= deg2rad(35.0) + 1e-9);
    CHECK(std::abs(el) <= deg2rad(35.0) + 1e-9);
  }
}

TEST_CASE("fan and ring per-voxel density histograms differ") {
  const SceneModel scene = wall_scene();
  RingLidarSpec ring;
  ring.pose = pose_at(0, 0, 1.9);
  FanLidarSpec fan;
  fan.pose = pose_at(0, 0, 1.7);

  const PointCloud rc = sample_ring_lidar(scene, ring);
  const PointCloud fc = sample_fan_lidar(scene, fan);
  REQUIRE(rc.size() > 2000);
  REQUIRE(fc.size() > 2000);

  auto histogram = [](const PointCloud& c) {
    std::map<std::array<long, 3>, int> cells;
    for (const Vec3& p : c.points) {
      cells[{std::lround(std::floor(p.x())), std::lround(std::floor(p.y())),
             std::lround(std::floor(p.z()))}]++;
    }
    std::map<int, double> hist;  // log2-bucketed occupancy counts
    for (const auto& [key, count] : cells) {
      hist[static_cast<int>(std::floor(std::log2(static_cast<double>(count))))] += 1.0;
    }
    double total = 0.0;
    for (auto& [k, v] : hist) total += v;
    for (auto& [k, v] : hist) v /= total;
    return hist;
  };
  const auto hr = histogram(rc);
  const auto hf = histogram(fc);
  double tv = 0.0;
  std::set<int> keys;
  for (const auto& [k, v] : hr) keys.insert(k);
  for (const auto& [k, v] : hf) keys.insert(k);
  for (int k : keys) {
    const double a = hr.count(k) ? hr.at(k) : 0.0;
    const double b = hf.count(k) ? hf.at(k) : 0.0;
    tv += std::abs(a - b) / 2.0;
  }
  CHECK(tv > 0.1);
}

TEST_CASE("fan sampler with zero hits returns empty") {
  SceneModel scene;
  scene.surfaces.push_back(Box{Vec3(-100.0, 0.0, 0.0), Vec3(1.0, 1.0, 1.0)});
  FanLidarSpec spec;
  spec.samples = 100;
  spec.max_range = 10.0;
  spec.pose = pose_at(0, 0, 1.7);
  CHECK(sample_fan_lidar(scene, spec).empty());
}

TEST_CASE("degrade identity when all knobs are zero") {
  Rng rng(7);
  PointCloud c;
  for (int i = 0; i < 100; ++i) {
    c.points.emplace_back(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0, 3));
  }
  DegradationSpec d;
  d.seed = 99;
  const PointCloud out = degrade(c, d);
  REQUIRE(out.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(out.points[i] == c.points[i]);
}

TEST_CASE("degrade dropout count") {
  PointCloud c;
  for (int i = 0; i < 1000; ++i) c.points.emplace_back(i * 0.01, 0.0, 0.0);
  DegradationSpec d;
  d.dropout_fraction = 0.5;
  d.seed = 3;
  CHECK(degrade(c, d).size() == 500);
}

TEST_CASE("degrade gaussian noise mean plane distance") {
  PointCloud c;
  Rng rng(11);
  for (int i = 0; i < 20000; ++i) {
    c.points.emplace_back(rng.uniform(-10, 10), rng.uniform(-10, 10), 0.0);
  }
  DegradationSpec d;
  d.noise_sigma = 0.02;
  d.seed = 5;
  const PointCloud out = degrade(c, d);
  double mean_abs_z = 0.0;
  for (const Vec3& p : out.points) mean_abs_z += std::abs(p.z());
  mean_abs_z /= static_cast<double>(out.size());
  const double expected = 0.02 * std::sqrt(2.0 / std::numbers::pi);  // half-normal mean
  CHECK(mean_abs_z == doctest::Approx(expected).epsilon(0.10));
}

TEST_CASE("degrade outliers land in the requested volume") {
  PointCloud c;
  for (int i = 0; i < 1000; ++i) c.points.emplace_back(0.0, 0.0, 0.0);
  DegradationSpec d;
  d.outlier_fraction = 0.2;
  d.outlier_volume = {Vec3(10.0, 10.0, 10.0), Vec3(20.0, 20.0, 20.0)};
  d.seed = 17;
  const PointCloud out = degrade(c, d);
  int outliers = 0;
  for (const Vec3& p : out.points) {
    if (p.norm() > 1.0) {
      ++outliers;
      CHECK(((p.array() >= 10.0) && (p.array() <= 20.0)).all());
    }
  }
  CHECK(outliers == 200);
}

TEST_CASE("degrade deterministic under fixed seed") {
  Rng rng(23);
  PointCloud c;
  for (int i = 0; i < 500; ++i) {
    c.points.emplace_back(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
  }
  DegradationSpec d;
  d.noise_sigma = 0.05;
  d.outlier_fraction = 0.1;
  d.dropout_fraction = 0.1;
  d.seed = 31;
  const PointCloud a = degrade(c, d);
  const PointCloud b = degrade(c, d);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points[i] == b.points[i]);
}

TEST_CASE("render_view_image basics") {
  SceneModel empty;
  empty.surfaces.push_back(Box{Vec3(1000.0, 0.0, 0.0), Vec3(0.1, 0.1, 0.1)});
  CameraIntrinsics cam;
  const ViewImage sky = render_view_image(empty, pose_at(0, 0, 1.5), cam, 16, 24);
  CHECK(sky.values.maxCoeff() == 0.0);

  SceneModel wall;
  wall.surfaces.push_back(Box{Vec3(5.5, 0.0, 0.0), Vec3(0.5, 500.0, 500.0)});
  const ViewImage flat = render_view_image(wall, pose_at(0, 0, 0), cam, 16, 24);
  CHECK(flat.values.minCoeff() > 0.0);

  // near box pixels strictly brighter than far wall pixels
  SceneModel two;
  two.surfaces.push_back(Box{Vec3(20.5, 0.0, 0.0), Vec3(0.5, 500.0, 500.0)});
  two.surfaces.push_back(Box{Vec3(4.0, 0.0, 0.0), Vec3(1.0, 1.0, 1.0)});
  const ViewImage img = render_view_image(two, pose_at(0, 0, 0), cam, 32, 48);
  double box_min = 1.0, wall_max = 0.0;
  int box_px = 0;
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const double v = img.values(r, c);
      if (v > 0.15) {
        box_min = std::min(box_min, v);
        ++box_px;
      } else if (v > 0.0) {
        wall_max = std::max(wall_max, v);
      }
    }
  }
  CHECK(box_px > 0);
  CHECK(box_min > wall_max);
  CHECK_THROWS_AS(render_view_image(two, pose_at(0, 0, 0), cam, 4, 24), std::invalid_argument);
}

TEST_CASE("overlap estimate near one for identical sensors, near zero for disjoint views") {
  // A wall fills the fan's view; the ring spec covers the same elevations, so
  // every fan point has a dense ring neighborhood.
  SceneModel facing_wall;
  facing_wall.surfaces.push_back(Box{Vec3(6.0, 0.0, 0.0), Vec3(0.5, 500.0, 500.0)});
  FanLidarSpec fan0;
  fan0.pose = pose_at(0.0, 0.0, 1.7);
  RingLidarSpec ring0;
  ring0.elev_min_deg = -45.0;
  ring0.elev_max_deg = 45.0;
  ring0.pose = pose_at(0.0, 0.0, 1.7);
  const PointCloud fan_world = sample_fan_lidar(facing_wall, fan0);
  const PointCloud ring_world = sample_ring_lidar(facing_wall, ring0);
  CHECK(overlap_estimate(fan_world, ring_world, RigidTransform::identity(), 0.5) > 0.9);

  // fan looking at far geometry the ring cannot reach
  SceneModel corridor;
  corridor.surfaces.push_back(Box{Vec3(-45.0, 0.0, 3.0), Vec3(0.5, 30.0, 3.0)});
  corridor.surfaces.push_back(Box{Vec3(45.0, 0.0, 3.0), Vec3(0.5, 30.0, 3.0)});
  FanLidarSpec fan;
  fan.pose = pose_at(-5.0, 0.0, 1.7, std::numbers::pi);  // faces the -x wall
  RingLidarSpec ring;
  ring.pose = pose_at(30.0, 0.0, 1.9);
  ring.max_range = 40.0;
  const PointCloud fw = sample_fan_lidar(corridor, fan);
  const PointCloud rw = sample_ring_lidar(corridor, ring);
  REQUIRE_FALSE(fw.empty());
  REQUIRE_FALSE(rw.empty());
  CHECK(overlap_estimate(fw, rw, RigidTransform::identity(), 0.5) < 0.1);
}

TEST_CASE("make_pair honors gt framing and overlap window") {
  SceneModel facing_wall;
  facing_wall.surfaces.push_back(Box{Vec3(6.0, 0.0, 0.0), Vec3(0.5, 500.0, 500.0)});
  PairGenConfig cfg;
  cfg.seed = 12;
  cfg.fan.pose = pose_at(0.0, 0.0, 1.7);
  cfg.ring.pose = pose_at(0.0, 0.3, 1.9);
  cfg.ring.elev_min_deg = -45.0;
  cfg.ring.elev_max_deg = 45.0;
  cfg.overlap_min = 0.5;
  cfg.overlap_max = 1.0;
  cfg.max_retries = 0;

  RigidTransform gt;
  gt.rotation = axis_angle(Vec3::UnitZ(), 0.7);
  gt.translation = Vec3(3.0, -1.0, 0.2);

  const ScenePair pair = make_pair(facing_wall, cfg, gt);
  CHECK(pair.overlap >= cfg.overlap_min);
  CHECK(pair.overlap <= cfg.overlap_max);
  CHECK(pair.image.valid());

  // With no degradation, gt must map every source point exactly back onto the
  // wall face the fan scanned (target/world frame): x = 5.5.
  const PointCloud mapped = apply_transform(gt, pair.source);
  for (const Vec3& p : mapped.points) {
    CHECK(std::abs(p.x() - 5.5) < 1e-9);
  }

  // and close to actual ring returns: median nearest distance within the
  // ring's sampling pitch
  GridIndex tgt_index(pair.target, 0.5);
  std::vector<double> dists;
  for (const Vec3& p : mapped.points) {
    dists.push_back(tgt_index.nearest(p).distance);
  }
  std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
  CHECK(dists[dists.size() / 2] < 0.25);
}

TEST_CASE("make_pair rejects out-of-window overlap at fixed poses") {
  SceneModel corridor;
  corridor.surfaces.push_back(Box{Vec3(-45.0, 0.0, 3.0), Vec3(0.5, 30.0, 3.0)});
  corridor.surfaces.push_back(Box{Vec3(45.0, 0.0, 3.0), Vec3(0.5, 30.0, 3.0)});
  PairGenConfig cfg;
  cfg.seed = 3;
  cfg.fan.pose = pose_at(-5.0, 0.0, 1.7, std::numbers::pi);
  cfg.ring.pose = pose_at(30.0, 0.0, 1.9);
  cfg.overlap_min = 0.4;
  cfg.overlap_max = 0.9;
  cfg.max_retries = 0;  // only the given poses
  cfg.min_points = 100;
  CHECK_THROWS_WITH_AS(make_pair(corridor, cfg, RigidTransform::identity()),
                       "overlap target unreachable", std::runtime_error);
}

TEST_CASE("make_pair deterministic under identical seeds") {
  const SceneModel scene = wall_scene();
  PairGenConfig cfg;
  cfg.seed = 77;
  cfg.fan.pose = pose_at(0.5, 0.5, 1.7, -0.2);
  cfg.ring.pose = pose_at(-0.5, -0.5, 1.9);
  cfg.overlap_min = 0.3;
  cfg.overlap_max = 1.0;
  cfg.degradation.noise_sigma = 0.02;
  cfg.degradation.outlier_fraction = 0.05;

  RigidTransform gt;
  gt.rotation = axis_angle(Vec3::UnitZ(), -0.5);
  gt.translation = Vec3(1.0, 2.0, 0.0);

  const ScenePair a = make_pair(scene, cfg, gt);
  const ScenePair b = make_pair(scene, cfg, gt);
  REQUIRE(a.source.size() == b.source.size());
  REQUIRE(a.target.size() == b.target.size());
  for (std::size_t i = 0; i < a.source.size(); ++i) {
    CHECK(a.source.points[i] == b.source.points[i]);
  }
  for (std::size_t i = 0; i < a.target.size(); ++i) {
    CHECK(a.target.points[i] == b.target.points[i]);
  }
  CHECK(a.overlap == b.overlap);
  CHECK((a.image.values - b.image.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("all raw hits lie on scene surfaces") {
  SceneModel scene;
  scene.surfaces.push_back(GroundPlane{0.0, 0.0, 0.0, 50.0, 50.0});
  scene.surfaces.push_back(Box{Vec3(5.0, 1.0, 1.0), Vec3(1.0, 1.0, 1.0)});
  scene.surfaces.push_back(Cylinder{Vec3(-4.0, -2.0, 0.0), 0.7, 5.0});
  RingLidarSpec spec;
  spec.azimuth_res_deg = 3.0;
  spec.pose = pose_at(0, 0, 1.8);
  const PointCloud cloud = sample_ring_lidar(scene, spec);
  REQUIRE_FALSE(cloud.empty());
  for (const Vec3& p : cloud.points) {
    const double on_ground = std::abs(p.z());
    const double on_box =
        ((p - Vec3(5.0, 1.0, 1.0)).cwiseAbs() - Vec3(1.0, 1.0, 1.0)).cwiseAbs().minCoeff();
    const double on_cyl = std::abs(std::hypot(p.x() + 4.0, p.y() + 2.0) - 0.7);
    CHECK(std::min({on_ground, on_box, on_cyl}) < 1e-9);
  }
}

TEST_CASE("scene validation rejects bad extents") {
  SceneModel scene;
  CHECK_THROWS_AS(scene.validate(), std::invalid_argument);
  scene.surfaces.push_back(Box{Vec3::Zero(), Vec3(1.0, 0.0, 1.0)});
  CHECK_THROWS_AS(scene.validate(), std::invalid_argument);
}
