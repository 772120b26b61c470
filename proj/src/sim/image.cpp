#include "crossreg/sim/image.hpp"

#include "crossreg/common/mathutil.hpp"
#include "crossreg/sim/lidar.hpp"

#include <cmath>
#include <stdexcept>

namespace crossreg::sim {

ViewImage render_view_image(const SceneModel& scene, const RigidTransform& camera_pose,
                            const CameraIntrinsics& intrinsics, int height, int width) {
  if (height < 8 || width < 8) throw std::invalid_argument("view image must be at least 8x8");
  camera_pose.validate();

  ViewImage img;
  img.height = height;
  img.width = width;
  img.values = MatX::Zero(height, width);

  const double hfov = deg2rad(intrinsics.hfov_deg);
  const double vfov = hfov * static_cast<double>(height) / static_cast<double>(width);
  const double R = intrinsics.max_range;
  const double floor_value = 1.0 / (1.0 + R);

  for (int r = 0; r < height; ++r) {
    const double v = (static_cast<double>(r) + 0.5) / height;
    const double el = (0.5 - v) * vfov;
    for (int c = 0; c < width; ++c) {
      const double u = (static_cast<double>(c) + 0.5) / width;
      const double az = (0.5 - u) * hfov;
      const Vec3 dir = camera_pose.rotation * az_el_direction(az, el);
      if (auto hit = raycast(scene, camera_pose.translation, dir, R)) {
        // Normalized inverse range: 1 at the camera, 0 at max range.
        img.values(r, c) = (1.0 / (1.0 + hit->range) - floor_value) / (1.0 - floor_value);
      }
    }
  }
  return img;
}

}  // namespace crossreg::sim
