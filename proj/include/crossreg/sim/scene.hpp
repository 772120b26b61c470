#pragma once

#include "crossreg/core/types.hpp"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace crossreg::sim {

/// Horizontal rectangle at height z, centered at (cx, cy).
struct GroundPlane {
  double z = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double half_x = 25.0;
  double half_y = 25.0;
};

/// Axis-aligned box.
struct Box {
  Vec3 center = Vec3::Zero();
  Vec3 half = Vec3::Ones();
};

/// Vertical cylinder, lateral surface only.
struct Cylinder {
  Vec3 base = Vec3::Zero();  // center of the bottom circle
  double radius = 0.5;
  double height = 3.0;
};

using Surface = std::variant<GroundPlane, Box, Cylinder>;

struct SceneModel {
  std::vector<Surface> surfaces;
  std::uint64_t seed = 0;

  void validate() const;  // throws when empty or extents are non-positive
};

struct RayHit {
  Vec3 point = Vec3::Zero();
  double range = 0.0;
};

/// Nearest intersection along origin + t * direction for t in (0, max_range].
/// The direction must be unit length (within 1e-9); otherwise throws.
std::optional<RayHit> raycast(const SceneModel& scene, const Vec3& origin,
                              const Vec3& direction,
                              double max_range = std::numeric_limits<double>::infinity());

/// Axis-aligned bounds covering all scene surfaces.
void scene_bounds(const SceneModel& scene, Vec3& lo, Vec3& hi);

/// Ground plane, a spread of boxes and cylinders; deterministic in the seed.
SceneModel random_scene(std::uint64_t seed, double extent = 18.0, int boxes = 10,
                        int cylinders = 5);

}  // namespace crossreg::sim
