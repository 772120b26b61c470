#pragma once

#include "crossreg/core/types.hpp"

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace crossreg {

struct NearestResult {
  int index = -1;
  double distance = 0.0;
};

/// Exhaustive nearest point; ties break to the lowest index.
/// Throws on an empty reference cloud.
NearestResult nearest_neighbor(const Vec3& query, const PointCloud& c);

/// Uniform hash-grid over a fixed cloud. Build once, query from any thread.
/// Query results are identical to exhaustive scans (including tie-breaks).
class GridIndex {
 public:
  GridIndex(const PointCloud& cloud, double cell);

  /// Indices of points with |p - q| <= r, ascending.
  std::vector<int> radius_indices(const Vec3& q, double r) const;

  /// True when any point lies strictly within r of q.
  bool has_neighbor_within(const Vec3& q, double r) const;

  NearestResult nearest(const Vec3& q) const;

  double cell() const { return cell_; }

  /// Reasonable cell size for a cloud: mean spacing estimate from the
  /// bounding box, clamped away from zero.
  static double auto_cell(const PointCloud& cloud);

 private:
  using CellKey = std::array<std::int64_t, 3>;
  struct KeyHash {
    std::size_t operator()(const CellKey& k) const;
  };

  CellKey key_of(const Vec3& p) const;

  const PointCloud& cloud_;
  double cell_;
  std::unordered_map<CellKey, std::vector<int>, KeyHash> cells_;
  CellKey min_key_{0, 0, 0};
  CellKey max_key_{0, 0, 0};
};

/// Assigns every dense point to its nearest superpoint; the groups partition
/// the dense cloud. Throws when either cloud is empty.
std::vector<int> point_to_node_group(const PointCloud& dense,
                                     const PointCloud& supers);

/// Inverse of the assignment: member indices per superpoint, ascending.
std::vector<std::vector<int>> group_members(const std::vector<int>& assignment,
                                            std::size_t super_count);

}  // namespace crossreg
