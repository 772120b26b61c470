#include "crossreg/core/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crossreg {

NearestResult nearest_neighbor(const Vec3& query, const PointCloud& c) {
  if (c.empty()) throw std::invalid_argument("empty reference cloud");
  int best = 0;
  double best_d2 = (c.points[0] - query).squaredNorm();
  for (std::size_t i = 1; i < c.size(); ++i) {
    const double d2 = (c.points[i] - query).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(i);
    }
  }
  return {best, std::sqrt(best_d2)};
}

std::size_t GridIndex::KeyHash::operator()(const CellKey& k) const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::int64_t v : k) {
    h ^= static_cast<std::uint64_t>(v);
    h *= 0x100000001b3ull;
  }
  return static_cast<std::size_t>(h);
}

GridIndex::GridIndex(const PointCloud& cloud, double cell)
    : cloud_(cloud), cell_(cell) {
  if (cloud.empty()) throw std::invalid_argument("empty reference cloud");
  if (!(cell > 0.0)) throw std::invalid_argument("grid cell must be positive");
  min_key_ = {std::numeric_limits<std::int64_t>::max(),
              std::numeric_limits<std::int64_t>::max(),
              std::numeric_limits<std::int64_t>::max()};
  max_key_ = {std::numeric_limits<std::int64_t>::min(),
              std::numeric_limits<std::int64_t>::min(),
              std::numeric_limits<std::int64_t>::min()};
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const CellKey k = key_of(cloud.points[i]);
    cells_[k].push_back(static_cast<int>(i));
    for (int a = 0; a < 3; ++a) {
      min_key_[a] = std::min(min_key_[a], k[a]);
      max_key_[a] = std::max(max_key_[a], k[a]);
    }
  }
}

GridIndex::CellKey GridIndex::key_of(const Vec3& p) const {
  return {static_cast<std::int64_t>(std::floor(p.x() / cell_)),
          static_cast<std::int64_t>(std::floor(p.y() / cell_)),
          static_cast<std::int64_t>(std::floor(p.z() / cell_))};
}

std::vector<int> GridIndex::radius_indices(const Vec3& q, double r) const {
  std::vector<int> out;
  if (!(r >= 0.0)) return out;
  const double r2 = r * r;
  const CellKey lo = key_of(q - Vec3::Constant(r));
  const CellKey hi = key_of(q + Vec3::Constant(r));
  CellKey k;
  for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0]) {
    for (k[1] = lo[1]; k[1] <= hi[1]; ++k[1]) {
      for (k[2] = lo[2]; k[2] <= hi[2]; ++k[2]) {
        const auto it = cells_.find(k);
        if (it == cells_.end()) continue;
        for (int idx : it->second) {
          if ((cloud_.points[idx] - q).squaredNorm() <= r2) out.push_back(idx);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool GridIndex::has_neighbor_within(const Vec3& q, double r) const {
  const double r2 = r * r;
  const CellKey lo = key_of(q - Vec3::Constant(r));
  const CellKey hi = key_of(q + Vec3::Constant(r));
  CellKey k;
  for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0]) {
    for (k[1] = lo[1]; k[1] <= hi[1]; ++k[1]) {
      for (k[2] = lo[2]; k[2] <= hi[2]; ++k[2]) {
        const auto it = cells_.find(k);
        if (it == cells_.end()) continue;
        for (int idx : it->second) {
          if ((cloud_.points[idx] - q).squaredNorm() < r2) return true;
        }
      }
    }
  }
  return false;
}

NearestResult GridIndex::nearest(const Vec3& q) const {
  const CellKey qk = key_of(q);
  std::int64_t max_ring = 0;
  for (int a = 0; a < 3; ++a) {
    max_ring = std::max(max_ring, std::abs(qk[a] - min_key_[a]));
    max_ring = std::max(max_ring, std::abs(qk[a] - max_key_[a]));
  }

  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
    if (ring > 0 && best >= 0) {
      // Any cell at Chebyshev distance `ring` is at least (ring-1)*cell away.
      const double bound = static_cast<double>(ring - 1) * cell_;
      if (bound * bound > best_d2) break;
    }
    CellKey k;
    for (k[0] = qk[0] - ring; k[0] <= qk[0] + ring; ++k[0]) {
      for (k[1] = qk[1] - ring; k[1] <= qk[1] + ring; ++k[1]) {
        for (k[2] = qk[2] - ring; k[2] <= qk[2] + ring; ++k[2]) {
          const std::int64_t cheb =
              std::max({std::abs(k[0] - qk[0]), std::abs(k[1] - qk[1]),
                        std::abs(k[2] - qk[2])});
          if (cheb != ring) continue;
          const auto it = cells_.find(k);
          if (it == cells_.end()) continue;
          for (int idx : it->second) {
            const double d2 = (cloud_.points[idx] - q).squaredNorm();
            if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
              best_d2 = d2;
              best = idx;
            }
          }
        }
      }
    }
  }
  return {best, std::sqrt(best_d2)};
}

double GridIndex::auto_cell(const PointCloud& cloud) {
  if (cloud.empty()) return 1.0;
  Vec3 lo = cloud.points[0];
  Vec3 hi = cloud.points[0];
  for (const Vec3& p : cloud.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double diag = (hi - lo).norm();
  const double n = std::cbrt(static_cast<double>(cloud.size()));
  return std::max(1e-3, diag / std::max(1.0, n));
}

std::vector<int> point_to_node_group(const PointCloud& dense,
                                     const PointCloud& supers) {
  if (dense.empty() || supers.empty()) {
    throw std::invalid_argument("empty reference cloud");
  }
  std::vector<int> assignment(dense.size());
  if (supers.size() < 64) {
    for (std::size_t i = 0; i < dense.size(); ++i) {
      assignment[i] = nearest_neighbor(dense.points[i], supers).index;
    }
    return assignment;
  }
  GridIndex index(supers, GridIndex::auto_cell(supers));
  for (std::size_t i = 0; i < dense.size(); ++i) {
    assignment[i] = index.nearest(dense.points[i]).index;
  }
  return assignment;
}

std::vector<std::vector<int>> group_members(const std::vector<int>& assignment,
                                            std::size_t super_count) {
  std::vector<std::vector<int>> groups(super_count);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    groups[assignment[i]].push_back(static_cast<int>(i));
  }
  return groups;
}

}  // namespace crossreg
