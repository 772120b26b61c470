#include "crossreg/sim/scene.hpp"

#include "crossreg/common/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crossreg::sim {

namespace {

constexpr double kMinT = 1e-9;

std::optional<double> hit_ground(const GroundPlane& g, const Vec3& o, const Vec3& d) {
  if (std::abs(d.z()) < 1e-15) return std::nullopt;
  const double t = (g.z - o.z()) / d.z();
  if (t <= kMinT) return std::nullopt;
  const double x = o.x() + t * d.x();
  const double y = o.y() + t * d.y();
  if (std::abs(x - g.cx) > g.half_x || std::abs(y - g.cy) > g.half_y) {
    return std::nullopt;
  }
  return t;
}

std::optional<double> hit_box(const Box& b, const Vec3& o, const Vec3& d) {
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    const double lo = b.center[a] - b.half[a];
    const double hi = b.center[a] + b.half[a];
    if (std::abs(d[a]) < 1e-15) {
      if (o[a] < lo || o[a] > hi) return std::nullopt;
      continue;
    }
    double t0 = (lo - o[a]) / d[a];
    double t1 = (hi - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
    if (tmin > tmax) return std::nullopt;
  }
  if (tmin > kMinT) return tmin;
  if (tmax > kMinT) return tmax;
  return std::nullopt;
}

std::optional<double> hit_cylinder(const Cylinder& c, const Vec3& o, const Vec3& d) {
  const double ox = o.x() - c.base.x();
  const double oy = o.y() - c.base.y();
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a < 1e-15) return std::nullopt;
  const double b = 2.0 * (ox * d.x() + oy * d.y());
  const double q = ox * ox + oy * oy - c.radius * c.radius;
  const double disc = b * b - 4.0 * a * q;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  for (double t : {(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)}) {
    if (t <= kMinT) continue;
    const double z = o.z() + t * d.z();
    if (z >= c.base.z() && z <= c.base.z() + c.height) return t;
  }
  return std::nullopt;
}

}  // namespace

void SceneModel::validate() const {
  if (surfaces.empty()) throw std::invalid_argument("scene has no surfaces");
  for (const Surface& s : surfaces) {
    const bool ok = std::visit(
        [](const auto& v) -> bool {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, GroundPlane>) {
            return v.half_x > 0.0 && v.half_y > 0.0;
          } else if constexpr (std::is_same_v<T, Box>) {
            return (v.half.array() > 0.0).all();
          } else {
            return v.radius > 0.0 && v.height > 0.0;
          }
        },
        s);
    if (!ok) throw std::invalid_argument("scene surface with non-positive extent");
  }
}

std::optional<RayHit> raycast(const SceneModel& scene, const Vec3& origin,
                              const Vec3& direction, double max_range) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("ray direction must be normalized");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Surface& s : scene.surfaces) {
    const std::optional<double> t = std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, GroundPlane>) return hit_ground(v, origin, direction);
          else if constexpr (std::is_same_v<T, Box>) return hit_box(v, origin, direction);
          else return hit_cylinder(v, origin, direction);
        },
        s);
    if (t && *t < best) best = *t;
  }
  if (!std::isfinite(best) || best > max_range) return std::nullopt;
  return RayHit{origin + best * direction, best};
}

void scene_bounds(const SceneModel& scene, Vec3& lo, Vec3& hi) {
  lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  hi = Vec3::Constant(-std::numeric_limits<double>::infinity());
  auto grow = [&](const Vec3& a, const Vec3& b) {
    lo = lo.cwiseMin(a);
    hi = hi.cwiseMax(b);
  };
  for (const Surface& s : scene.surfaces) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, GroundPlane>) {
            grow(Vec3(v.cx - v.half_x, v.cy - v.half_y, v.z),
                 Vec3(v.cx + v.half_x, v.cy + v.half_y, v.z));
          } else if constexpr (std::is_same_v<T, Box>) {
            grow(v.center - v.half, v.center + v.half);
          } else {
            grow(v.base - Vec3(v.radius, v.radius, 0.0),
                 v.base + Vec3(v.radius, v.radius, v.height));
          }
        },
        s);
  }
}

SceneModel random_scene(std::uint64_t seed, double extent, int boxes, int cylinders) {
  Rng rng(mix_seed(seed, 0x5ce9e));
  SceneModel scene;
  scene.seed = seed;
  scene.surfaces.push_back(GroundPlane{0.0, 0.0, 0.0, extent * 1.4, extent * 1.4});
  for (int i = 0; i < boxes; ++i) {
    Box b;
    b.half = Vec3(rng.uniform(0.6, 2.4), rng.uniform(0.6, 2.4), rng.uniform(0.8, 2.6));
    b.center = Vec3(rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                    b.half.z());  // resting on the ground
    scene.surfaces.push_back(b);
  }
  for (int i = 0; i < cylinders; ++i) {
    Cylinder c;
    c.radius = rng.uniform(0.2, 0.9);
    c.height = rng.uniform(2.0, 6.0);
    c.base = Vec3(rng.uniform(-extent, extent), rng.uniform(-extent, extent), 0.0);
    scene.surfaces.push_back(c);
  }
  return scene;
}

}  // namespace crossreg::sim
