#pragma once

#include "crossreg/core/types.hpp"
#include "crossreg/sim/scene.hpp"

namespace crossreg::sim {

/// Grayscale range view. values(r, c) in [0, 1]: 1 at the camera, falling to
/// 0 at max range; 0 where nothing was hit.
struct ViewImage {
  int height = 0;
  int width = 0;
  MatX values;  // height x width

  bool valid() const { return height >= 8 && width >= 8 && values.rows() == height && values.cols() == width; }
};

struct CameraIntrinsics {
  double hfov_deg = 70.0;
  double max_range = 40.0;
};

/// Pinhole render of normalized inverse range. Camera frame matches the
/// sensors: +x forward, +y left, +z up.
ViewImage render_view_image(const SceneModel& scene, const RigidTransform& camera_pose,
                            const CameraIntrinsics& intrinsics, int height, int width);

}  // namespace crossreg::sim
