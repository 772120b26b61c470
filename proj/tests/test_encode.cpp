#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crossreg/common/mathutil.hpp"
#include "crossreg/common/rng.hpp"
#include "crossreg/core/search.hpp"
#include "crossreg/core/transform.hpp"
#include "crossreg/enc/image_features.hpp"
#include "crossreg/enc/positional.hpp"
#include "crossreg/enc/pyramid.hpp"
#include "crossreg/sim/lidar.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace crossreg;
using namespace crossreg::enc;

namespace {

PointCloud plane_patch(Rng& rng, int n, double size, double z = 0.0) {
  PointCloud c;
  for (int i = 0; i < n; ++i) {
    c.points.emplace_back(rng.uniform(-size, size), rng.uniform(-size, size), z);
  }
  return c;
}

PointCloud gaussian_blob(Rng& rng, int n, double sigma) {
  PointCloud c;
  for (int i = 0; i < n; ++i) {
    c.points.emplace_back(rng.normal(0.0, sigma), rng.normal(0.0, sigma),
                          rng.normal(0.0, sigma));
  }
  return c;
}

// brute-force PCA eigen-features over an explicit neighborhood
struct EigenFeatures {
  double linearity, planarity, sphericity;
};
EigenFeatures pca_oracle(const PointCloud& support, const Vec3& center, double radius) {
  std::vector<Vec3> nb;
  for (const Vec3& p : support.points) {
    if ((p - center).norm() <= radius) nb.push_back(p);
  }
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : nb) mean += p;
  mean /= static_cast<double>(nb.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : nb) cov += (p - mean) * (p - mean).transpose();
  cov /= static_cast<double>(nb.size());
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  const double e1 = eig.eigenvalues()[2], e2 = eig.eigenvalues()[1], e3 = eig.eigenvalues()[0];
  return {(e1 - e2) / e1, (e2 - e3) / e1, e3 / e1};
}

}  // namespace

TEST_CASE("planar patch yields planarity-dominant descriptors") {
  // Ideal plane: a regular grid keeps the two in-plane sample eigenvalues
  // equal; random sampling would split them by O(1/sqrt(n)).
  PointCloud plane;
  for (int ix = -50; ix <= 50; ++ix) {
    for (int iy = -50; iy <= 50; ++iy) {
      plane.points.emplace_back(ix * 0.1, iy * 0.1, 0.0);
    }
  }
  Rng rng(3);
  std::vector<Vec3> queries;
  for (int i = 0; i < 20; ++i) {
    queries.emplace_back(rng.uniform(-3, 3), rng.uniform(-3, 3), 0.0);
  }
  const std::vector<double> radii = {1.0};
  const MatX feats = compute_descriptors(queries, plane, radii, 32);
  for (Eigen::Index i = 0; i < feats.rows(); ++i) {
    // channel layout: [bias, lin, plan, sph, vert, density, height, ...]
    const double lin = feats(i, 1), plan = feats(i, 2), sph = feats(i, 3);
    CHECK(plan > 10.0 * std::max(lin, sph));
    const auto oracle = pca_oracle(plane, queries[i], 1.0);
    CHECK(oracle.planarity > 0.95);
    CHECK(oracle.sphericity < 0.01);
  }
}

TEST_CASE("isotropic blob yields sphericity-dominant descriptors") {
  Rng rng(5);
  const PointCloud blob = gaussian_blob(rng, 6000, 2.0);
  std::vector<Vec3> queries = {Vec3::Zero(), Vec3(0.3, -0.2, 0.1)};
  const MatX feats = compute_descriptors(queries, blob, {2.5}, 32);
  for (Eigen::Index i = 0; i < feats.rows(); ++i) {
    const double lin = feats(i, 1), plan = feats(i, 2), sph = feats(i, 3);
    CHECK(sph > lin);
    CHECK(sph > plan);
    const auto oracle = pca_oracle(blob, queries[i], 2.5);
    CHECK(oracle.sphericity > 0.5);
  }
}

TEST_CASE("descriptor rows are unit norm and finite") {
  Rng rng(7);
  PointCloud c = gaussian_blob(rng, 2000, 4.0);
  EncoderConfig cfg;
  const FeaturePyramid pyr = encode_point_pyramid(c, cfg);
  for (const PyramidLevel& level : pyr.levels) {
    REQUIRE(level.features.allFinite());
    for (Eigen::Index i = 0; i < level.features.rows(); ++i) {
      CHECK(level.features.row(i).norm() == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("pyramid counts strictly decrease and nest") {
  Rng rng(11);
  PointCloud c = plane_patch(rng, 20000, 12.0);
  for (Vec3& p : c.points) p.z() = rng.uniform(0.0, 0.05);
  EncoderConfig cfg;
  const FeaturePyramid pyr = encode_point_pyramid(c, cfg);
  REQUIRE(pyr.levels.size() >= 2);
  for (std::size_t l = 1; l < pyr.levels.size(); ++l) {
    CHECK(pyr.levels[l].points.size() < pyr.levels[l - 1].points.size());
  }
  // every coarse point is a centroid of finer points: a finer point must lie
  // within its voxel's half diagonal
  for (std::size_t l = 1; l < pyr.levels.size(); ++l) {
    GridIndex finer(pyr.levels[l - 1].points, 1.0);
    const double bound = pyr.levels[l].voxel * std::sqrt(3.0) / 2.0 + 1e-9;
    for (const Vec3& p : pyr.levels[l].points.points) {
      CHECK(finer.nearest(p).distance <= bound);
    }
  }
  const auto assign = point_to_node_group(pyr.dense().points, pyr.coarse().points);
  CHECK(assign.size() == pyr.dense().points.size());
}

TEST_CASE("encoder rejects degenerate clouds") {
  PointCloud tiny;
  for (int i = 0; i < 10; ++i) tiny.points.emplace_back(i * 1.0, 0.0, 0.0);
  EncoderConfig cfg;
  CHECK_THROWS_WITH_AS(encode_point_pyramid(tiny, cfg), "degenerate cloud",
                       std::invalid_argument);
}

TEST_CASE("descriptors invariant under z-preserving rigid transforms") {
  Rng rng(13);
  // structured cloud: ground plane, a wall and a blob
  PointCloud c = plane_patch(rng, 4000, 8.0);
  for (int i = 0; i < 2000; ++i) {
    c.points.emplace_back(rng.uniform(-8, 8), 4.0 + rng.uniform(-0.02, 0.02),
                          rng.uniform(0.0, 3.0));
  }
  for (int i = 0; i < 1000; ++i) {
    c.points.emplace_back(2.0 + rng.normal(0.0, 0.5), -2.0 + rng.normal(0.0, 0.5),
                          1.0 + rng.normal(0.0, 0.5));
  }
  std::vector<Vec3> queries;
  for (int i = 0; i < 30; ++i) {
    queries.push_back(c.points[rng.uniform_int(static_cast<int>(c.size()))]);
  }

  RigidTransform t;  // yaw plus xy translation keeps the z structure
  t.rotation = axis_angle(Vec3::UnitZ(), 1.1);
  t.translation = Vec3(4.0, -7.0, 0.0);

  const std::vector<double> radii = {0.8, 1.6};
  const MatX base = compute_descriptors(queries, c, radii, 32);
  const PointCloud moved = apply_transform(t, c);
  std::vector<Vec3> moved_queries;
  for (const Vec3& q : queries) moved_queries.push_back(t * q);
  const MatX after = compute_descriptors(moved_queries, moved, radii, 32);
  for (Eigen::Index i = 0; i < base.rows(); ++i) {
    CHECK((base.row(i) - after.row(i)).norm() < 5e-2);
  }
}

TEST_CASE("same patch sampled by ring and fan yields consistent descriptors") {
  // Both sensors scan the same wall; nearest cross-pairs must agree in feature
  // space despite the very different sampling patterns.
  sim::SceneModel scene;
  scene.surfaces.push_back(sim::Box{Vec3(7.0, 0.0, 0.0), Vec3(0.5, 500.0, 500.0)});
  scene.surfaces.push_back(sim::GroundPlane{0.0, 0.0, 0.0, 40.0, 40.0});
  sim::RingLidarSpec ring;
  ring.elev_min_deg = -40.0;
  ring.elev_max_deg = 40.0;
  ring.pose.translation = Vec3(0.0, 0.0, 1.9);
  sim::FanLidarSpec fan;
  fan.pose.translation = Vec3(0.0, 0.0, 1.7);

  const PointCloud ring_cloud = sample_ring_lidar(scene, ring);
  const PointCloud fan_cloud = sample_fan_lidar(scene, fan);
  REQUIRE(ring_cloud.size() > 3000);
  REQUIRE(fan_cloud.size() > 3000);

  EncoderConfig cfg;
  const FeaturePyramid ring_pyr = encode_point_pyramid(ring_cloud, cfg);
  const FeaturePyramid fan_pyr = encode_point_pyramid(fan_cloud, cfg);

  GridIndex ring_index(ring_pyr.dense().points, 0.5);
  double cos_sum = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < fan_pyr.dense().points.size(); ++i) {
    const auto nn = ring_index.nearest(fan_pyr.dense().points.points[i]);
    if (nn.distance > 0.35) continue;
    cos_sum += fan_pyr.dense().features.row(static_cast<Eigen::Index>(i))
                   .dot(ring_pyr.dense().features.row(nn.index));
    ++used;
  }
  REQUIRE(used > 300);
  CHECK(cos_sum / used >= 0.9);
}

TEST_CASE("image features: constant image has zero gradients") {
  sim::ViewImage img;
  img.height = 16;
  img.width = 20;
  img.values = MatX::Constant(16, 20, 0.4);
  const MatX raw = image_raw_channels(img, 3);
  for (int d = 0; d < 3; ++d) {
    CHECK(raw.col(2 + 3 * d).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(raw.col(3 + 3 * d).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(raw.col(1 + 3 * d).isApproxToConstant(0.4, 1e-12));
  }
}

TEST_CASE("image features: vertical step edge peaks on the edge column") {
  sim::ViewImage img;
  img.height = 12;
  img.width = 32;
  img.values = MatX::Zero(12, 32);
  const int edge = 16;
  for (int r = 0; r < 12; ++r) {
    for (int c = edge; c < 32; ++c) img.values(r, c) = 1.0;
  }
  const MatX raw = image_raw_channels(img, 2);
  for (int r = 0; r < 12; ++r) {
    double row_max = 0.0;
    for (int c = 0; c < 32; ++c) row_max = std::max(row_max, raw(r * 32 + c, 2));
    CHECK(raw(r * 32 + edge, 2) == doctest::Approx(row_max).epsilon(1e-12));
    CHECK(raw(r * 32 + 2, 2) == 0.0);     // far left: flat
    CHECK(raw(r * 32 + 29, 2) == 0.0);    // far right: flat
    CHECK(raw(r * 32 + edge, 3) == 0.0);  // no vertical gradient anywhere
  }
}

TEST_CASE("encode_image shape and normalization") {
  sim::ViewImage img;
  img.height = 16;
  img.width = 24;
  img.values = MatX::Zero(16, 24);
  Rng rng(17);
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 24; ++c) img.values(r, c) = rng.uniform();
  }
  EncoderConfig cfg;
  const ImageFeatureGrid grid = encode_image(img, cfg);
  CHECK(grid.features.rows() == 16 * 24);
  CHECK(grid.features.cols() == cfg.unified_dim);
  REQUIRE(grid.features.allFinite());
  for (Eigen::Index i = 0; i < grid.features.rows(); ++i) {
    CHECK(grid.features.row(i).norm() == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("positional encoding basics") {
  MatX origin = MatX::Zero(1, 3);
  const MatX enc0 = positional_encoding(origin, 8);
  for (int p = 0; p < 4; ++p) {
    CHECK(enc0(0, 2 * p) == doctest::Approx(0.0));      // sin 0
    CHECK(enc0(0, 2 * p + 1) == doctest::Approx(1.0));  // cos 0
  }

  MatX coords(2, 3);
  coords << 1.2, -0.4, 3.3, 1.2, -0.4, 3.3;
  const MatX enc = positional_encoding(coords, 16);
  CHECK((enc.row(0) - enc.row(1)).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(positional_encoding(coords, 7), std::invalid_argument);
}

TEST_CASE("positional encoding has constant norm") {
  Rng rng(19);
  MatX coords(50, 3);
  for (int i = 0; i < 50; ++i) {
    coords.row(i) << rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(-30, 30);
  }
  const int dim = 24;
  const MatX enc = positional_encoding(coords, dim);
  const double expected = std::sqrt(dim / 2.0);
  for (int i = 0; i < 50; ++i) {
    CHECK(enc.row(i).norm() == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("positional encoding separates distinct coordinates") {
  MatX coords(2, 3);
  coords << 0.0, 0.0, 0.0, 1.3, 0.0, 0.0;
  const MatX enc = positional_encoding(coords, 32);
  CHECK((enc.row(0) - enc.row(1)).norm() > 1e-3);
}

TEST_CASE("pyramid determinism") {
  Rng rng(23);
  PointCloud c = gaussian_blob(rng, 3000, 5.0);
  EncoderConfig cfg;
  const FeaturePyramid a = encode_point_pyramid(c, cfg);
  const FeaturePyramid b = encode_point_pyramid(c, cfg);
  REQUIRE(a.levels.size() == b.levels.size());
  for (std::size_t l = 0; l < a.levels.size(); ++l) {
    CHECK((a.levels[l].features - b.levels[l].features).cwiseAbs().maxCoeff() == 0.0);
  }
}
