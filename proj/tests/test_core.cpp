#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crossreg/common/mathutil.hpp"
#include "crossreg/common/rng.hpp"
#include "crossreg/core/metrics.hpp"
#include "crossreg/core/search.hpp"
#include "crossreg/core/transform.hpp"
#include "crossreg/core/voxel.hpp"

#include <cmath>
#include <numbers>

using namespace crossreg;

namespace {

RigidTransform random_transform(Rng& rng) {
  RigidTransform t;
  t.rotation = (Eigen::AngleAxisd(rng.uniform(-std::numbers::pi, std::numbers::pi), Vec3::UnitZ()) *
                Eigen::AngleAxisd(rng.uniform(-1.0, 1.0), Vec3::UnitY()) *
                Eigen::AngleAxisd(rng.uniform(-1.0, 1.0), Vec3::UnitX()))
                   .toRotationMatrix();
  t.translation = Vec3(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10));
  return t;
}

PointCloud random_cloud(Rng& rng, int n, double extent = 10.0) {
  PointCloud c;
  for (int i = 0; i < n; ++i) {
    c.points.emplace_back(rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                          rng.uniform(-extent, extent));
  }
  return c;
}

}  // namespace

TEST_CASE("rigid transform validity") {
  RigidTransform t;
  CHECK(t.is_valid());
  t.rotation(0, 0) = 2.0;
  CHECK_FALSE(t.is_valid());
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);

  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const RigidTransform r = random_transform(rng);
    CHECK((r.rotation.transpose() * r.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(r.rotation.determinant() - 1.0) < 1e-9);
  }
}

TEST_CASE("apply_transform identity and inverse round trip") {
  Rng rng(7);
  const PointCloud c = random_cloud(rng, 50);
  const PointCloud same = apply_transform(RigidTransform::identity(), c);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(same.points[i] == c.points[i]);

  const RigidTransform t = random_transform(rng);
  const PointCloud back = apply_transform(t.inverse(), apply_transform(t, c));
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK((back.points[i] - c.points[i]).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("apply_transform rotates 90 degrees about z") {
  RigidTransform t;
  t.rotation = axis_angle(Vec3::UnitZ(), std::numbers::pi / 2);
  PointCloud c;
  c.points.emplace_back(1.0, 0.0, 0.0);
  const PointCloud r = apply_transform(t, c);
  CHECK((r.points[0] - Vec3(0.0, 1.0, 0.0)).norm() < 1e-12);
}

TEST_CASE("apply_transform preserves pairwise distances") {
  Rng rng(3);
  const PointCloud c = random_cloud(rng, 40);
  const PointCloud r = apply_transform(random_transform(rng), c);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double d0 = (c.points[i] - c.points[j]).norm();
      const double d1 = (r.points[i] - r.points[j]).norm();
      CHECK(std::abs(d0 - d1) < 1e-9);
    }
  }
}

TEST_CASE("compose semantics") {
  Rng rng(5);
  const RigidTransform a = random_transform(rng);
  const RigidTransform b = random_transform(rng);

  const RigidTransform id_b = compose(RigidTransform::identity(), b);
  CHECK((id_b.rotation - b.rotation).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((id_b.translation - b.translation).norm() < 1e-12);

  const RigidTransform ainv = compose(a, a.inverse());
  CHECK((ainv.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(ainv.translation.norm() < 1e-9);

  RigidTransform rot45;
  rot45.rotation = axis_angle(Vec3::UnitZ(), std::numbers::pi / 4);
  const RigidTransform rot90 = compose(rot45, rot45);
  CHECK((rot90.rotation - axis_angle(Vec3::UnitZ(), std::numbers::pi / 2)).cwiseAbs().maxCoeff() < 1e-12);

  const PointCloud c = random_cloud(rng, 20);
  const PointCloud lhs = apply_transform(compose(a, b), c);
  const PointCloud rhs = apply_transform(a, apply_transform(b, c));
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK((lhs.points[i] - rhs.points[i]).norm() < 1e-9);
  }
}

TEST_CASE("voxel_downsample single cell centroid") {
  PointCloud c;
  Vec3 sum = Vec3::Zero();
  Rng rng(2);
  for (int i = 0; i < 8; ++i) {
    const Vec3 p(rng.uniform(0.0, 0.24), rng.uniform(0.0, 0.24), rng.uniform(0.0, 0.24));
    c.points.push_back(p);
    sum += p;
  }
  const PointCloud d = voxel_downsample(c, 0.25);
  REQUIRE(d.size() == 1);
  CHECK((d.points[0] - sum / 8.0).norm() < 1e-12);
}

TEST_CASE("voxel_downsample keeps separated points") {
  PointCloud c;
  for (int i = 0; i < 10; ++i) c.points.emplace_back(static_cast<double>(i), 0.0, 0.0);
  const PointCloud d = voxel_downsample(c, 0.25);
  CHECK(d.size() == c.size());
}

TEST_CASE("voxel_downsample outputs stay near inputs") {
  Rng rng(13);
  const PointCloud c = random_cloud(rng, 10000, 5.0);
  const double voxel = 0.25;
  const PointCloud d = voxel_downsample(c, voxel);
  const double bound = voxel * std::sqrt(3.0) / 2.0 + 1e-12;
  for (const Vec3& p : d.points) {
    double best = 1e30;
    for (const Vec3& q : c.points) best = std::min(best, (p - q).norm());
    CHECK(best <= bound);
  }
}

TEST_CASE("voxel_downsample is idempotent at a fixed size") {
  Rng rng(17);
  const PointCloud c = random_cloud(rng, 2000, 8.0);
  for (double voxel : {0.25, 0.8, 2.0}) {
    const PointCloud once = voxel_downsample(c, voxel);
    const PointCloud twice = voxel_downsample(once, voxel);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
      CHECK((once.points[i] - twice.points[i]).norm() < 1e-12);
    }
  }
}

TEST_CASE("voxel_downsample handles empty input and rejects bad voxel") {
  CHECK(voxel_downsample(PointCloud{}, 0.25).empty());
  CHECK_THROWS_AS(voxel_downsample(PointCloud{}, 0.0), std::invalid_argument);
}

TEST_CASE("nearest_neighbor basics and tie break") {
  PointCloud c = {};
  for (int i = 0; i < 10; ++i) c.points.emplace_back(static_cast<double>(i), 0.0, 0.0);
  const auto hit = nearest_neighbor(c.points[5], c);
  CHECK(hit.index == 5);
  CHECK(hit.distance == 0.0);

  PointCloud ties;
  ties.points = {Vec3(5, 0, 0), Vec3(9, 0, 0), Vec3(-1, 0, 0), Vec3(3, 0, 0),
                 Vec3(9, 9, 9), Vec3(8, 0, 0), Vec3(7, 0, 0), Vec3(1, 0, 0)};
  // indices 2 and 7 are equidistant from x = 0
  const auto tie = nearest_neighbor(Vec3::Zero(), ties);
  CHECK(tie.index == 2);

  CHECK_THROWS_WITH_AS(nearest_neighbor(Vec3::Zero(), PointCloud{}), "empty reference cloud",
                       std::invalid_argument);
}

TEST_CASE("grid index nearest matches exhaustive scan") {
  Rng rng(23);
  const PointCloud c = random_cloud(rng, 1000, 12.0);
  GridIndex index(c, 1.5);
  for (int q = 0; q < 100; ++q) {
    const Vec3 query(rng.uniform(-14, 14), rng.uniform(-14, 14), rng.uniform(-14, 14));
    const auto brute = nearest_neighbor(query, c);
    const auto fast = index.nearest(query);
    CHECK(fast.index == brute.index);
    CHECK(fast.distance == doctest::Approx(brute.distance).epsilon(1e-12));
  }
}

TEST_CASE("grid index radius query matches exhaustive filter") {
  Rng rng(29);
  const PointCloud c = random_cloud(rng, 500, 6.0);
  GridIndex index(c, 0.8);
  for (int q = 0; q < 30; ++q) {
    const Vec3 query(rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(-6, 6));
    const double r = rng.uniform(0.3, 2.5);
    std::vector<int> brute;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if ((c.points[i] - query).squaredNorm() <= r * r) brute.push_back(static_cast<int>(i));
    }
    CHECK(index.radius_indices(query, r) == brute);
  }
}

TEST_CASE("point_to_node_group equals brute force") {
  Rng rng(31);
  const PointCloud dense = random_cloud(rng, 800, 10.0);
  const PointCloud supers = random_cloud(rng, 100, 10.0);
  const std::vector<int> assign = point_to_node_group(dense, supers);
  for (std::size_t i = 0; i < dense.size(); ++i) {
    CHECK(assign[i] == nearest_neighbor(dense.points[i], supers).index);
  }

  // supers == dense: every point maps to itself
  const std::vector<int> self_assign = point_to_node_group(dense, dense);
  for (std::size_t i = 0; i < dense.size(); ++i) CHECK(self_assign[i] == static_cast<int>(i));

  // a single superpoint collects everything
  PointCloud one;
  one.points.emplace_back(0.0, 0.0, 0.0);
  for (int a : point_to_node_group(dense, one)) CHECK(a == 0);
}

TEST_CASE("rre closed forms") {
  const Mat3 i = Mat3::Identity();
  CHECK(rre(i, i) == doctest::Approx(0.0).epsilon(1e-12));

  const Mat3 r10 = axis_angle(Vec3::UnitZ(), deg2rad(10.0));
  CHECK(rre(r10, i) == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(rre(i, r10) == doctest::Approx(10.0).epsilon(1e-9));  // symmetric

  const Mat3 r180 = axis_angle(Vec3::UnitX(), std::numbers::pi);
  CHECK(rre(r180, i) == doctest::Approx(180.0).epsilon(1e-9));
}

TEST_CASE("rre invariant under common left rotation") {
  Rng rng(37);
  for (int k = 0; k < 20; ++k) {
    const Mat3 a = random_transform(rng).rotation;
    const Mat3 b = random_transform(rng).rotation;
    const Mat3 s = random_transform(rng).rotation;
    CHECK(rre(s * a, s * b) == doctest::Approx(rre(a, b)).epsilon(1e-7));
  }
}

TEST_CASE("rte closed forms") {
  CHECK(rte(Vec3(1, 2, 3), Vec3(1, 2, 3)) == 0.0);
  CHECK(rte(Vec3(1, 0, 0), Vec3::Zero()) == doctest::Approx(1.0));
  CHECK(rte(Vec3(1, 2, 2), Vec3::Zero()) == doctest::Approx(3.0));
}

TEST_CASE("inlier_ratio counting") {
  Rng rng(41);
  const PointCloud src = random_cloud(rng, 40);
  const RigidTransform gt = random_transform(rng);
  const PointCloud tgt = apply_transform(gt, src);

  CorrespondenceSet exact;
  for (int i = 0; i < 40; ++i) exact.add(i, i);
  CHECK(inlier_ratio(exact, src, tgt, gt) == doctest::Approx(1.0));

  PointCloud shifted = tgt;
  for (Vec3& p : shifted.points) p += Vec3(2.0, 0.0, 0.0);
  CHECK(inlier_ratio(exact, src, shifted, gt, 1.0) == doctest::Approx(0.0));

  // half exact, half offset by 2 m
  PointCloud mixed = tgt;
  for (std::size_t i = 0; i < 20; ++i) mixed.points[i] += Vec3(0.0, 2.0, 0.0);
  CHECK(inlier_ratio(exact, src, mixed, gt, 1.0) == doctest::Approx(0.5));

  bool empty_flag = false;
  CHECK(inlier_ratio(CorrespondenceSet{}, src, tgt, gt, 1.0, &empty_flag) == 0.0);
  CHECK(empty_flag);
}

TEST_CASE("registration_recall strictness and counting") {
  std::vector<RegistrationMetrics> results;
  for (int i = 0; i < 4; ++i) results.push_back({0.0, 0.0, true, 1.0});
  CHECK(registration_recall(results) == doctest::Approx(1.0));

  results[3].rre_deg = 2.0;  // exactly at the threshold: strict < counts it out
  results[3].rte_m = 0.4;
  CHECK(registration_recall(results) == doctest::Approx(0.75));

  CHECK_THROWS_WITH_AS(registration_recall({}), "no results", std::invalid_argument);
}

TEST_CASE("registration_recall monotone in thresholds") {
  Rng rng(43);
  std::vector<RegistrationMetrics> results;
  for (int i = 0; i < 50; ++i) {
    results.push_back({rng.uniform(0.0, 5.0), rng.uniform(0.0, 1.2), false, 0.0});
  }
  double prev = 0.0;
  for (double f = 0.2; f <= 3.0; f += 0.2) {
    const double rr = registration_recall(results, 2.0 * f, 0.5 * f);
    CHECK(rr >= prev);
    prev = rr;
  }
}
