#include "crossreg/core/transform.hpp"

namespace crossreg {

PointCloud apply_transform(const RigidTransform& t, const PointCloud& c) {
  PointCloud out;
  out.points.reserve(c.size());
  for (const Vec3& p : c.points) out.points.push_back(t * p);
  out.intensity = c.intensity;
  return out;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform r;
  r.rotation = a.rotation * b.rotation;
  r.translation = a.rotation * b.translation + a.translation;
  return r;
}

RigidTransform inverse(const RigidTransform& t) { return t.inverse(); }

Mat3 axis_angle(const Vec3& axis, double angle_rad) {
  return Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
}

}  // namespace crossreg
