#pragma once

#include "crossreg/core/types.hpp"

namespace crossreg {

/// Maps every point through q = R * p + t; cardinality and order preserved.
PointCloud apply_transform(const RigidTransform& t, const PointCloud& c);

/// Composition: apply(compose(a, b), x) == apply(a, apply(b, x)).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

RigidTransform inverse(const RigidTransform& t);

/// Rotation of `angle_rad` about a (normalized) axis.
Mat3 axis_angle(const Vec3& axis, double angle_rad);

}  // namespace crossreg
