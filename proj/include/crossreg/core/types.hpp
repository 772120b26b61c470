#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <utility>
#include <vector>

namespace crossreg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Rigid motion q = R * p + t, R in SO(3).
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

  RigidTransform inverse() const {
    RigidTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation);
    return inv;
  }

  bool is_valid(double tol = 1e-9) const;
  /// Throws std::invalid_argument when the rotation is not in SO(3).
  void validate(double tol = 1e-9) const;
};

/// Point order is stable: indices are identities throughout the pipeline.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<double> intensity;  // optional; empty or same length as points

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  const Vec3& operator[](std::size_t i) const { return points[i]; }
  Vec3& operator[](std::size_t i) { return points[i]; }
};

/// Rows of an n x 3 matrix view of the cloud.
MatX to_matrix(const PointCloud& c);

enum class MatchGranularity { kSuperpoint, kDense };

struct CorrespondenceSet {
  std::vector<std::pair<int, int>> pairs;  // (source index, target index)
  std::vector<double> confidence;          // same length as pairs
  MatchGranularity granularity = MatchGranularity::kDense;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }

  void add(int src, int tgt, double conf = 1.0) {
    pairs.emplace_back(src, tgt);
    confidence.push_back(conf);
  }

  /// Index bounds and confidence sanity; throws on violation.
  void validate(std::size_t src_size, std::size_t tgt_size) const;
};

struct RegistrationMetrics {
  double rre_deg = 0.0;
  double rte_m = 0.0;
  bool success = false;
  double inlier_ratio = 0.0;
};

}  // namespace crossreg
