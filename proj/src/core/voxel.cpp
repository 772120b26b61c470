#include "crossreg/core/voxel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace crossreg {

namespace {

using LatticeKey = std::array<std::int64_t, 3>;

struct KeyHash {
  std::size_t operator()(const LatticeKey& k) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::int64_t v : k) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

struct Accum {
  Vec3 sum = Vec3::Zero();
  double intensity_sum = 0.0;
  std::int64_t count = 0;
};

}  // namespace

PointCloud voxel_downsample(const PointCloud& c, double voxel) {
  if (!(voxel > 0.0)) throw std::invalid_argument("voxel size must be positive");
  PointCloud out;
  if (c.empty()) return out;

  const bool has_intensity = c.intensity.size() == c.size();
  std::unordered_map<LatticeKey, Accum, KeyHash> cells;
  cells.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec3& p = c.points[i];
    const LatticeKey key = {static_cast<std::int64_t>(std::floor(p.x() / voxel)),
                            static_cast<std::int64_t>(std::floor(p.y() / voxel)),
                            static_cast<std::int64_t>(std::floor(p.z() / voxel))};
    Accum& a = cells[key];
    a.sum += p;
    if (has_intensity) a.intensity_sum += c.intensity[i];
    ++a.count;
  }

  std::vector<std::pair<LatticeKey, Accum>> sorted(cells.begin(), cells.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  out.points.reserve(sorted.size());
  if (has_intensity) out.intensity.reserve(sorted.size());
  for (const auto& [key, a] : sorted) {
    const double n = static_cast<double>(a.count);
    out.points.push_back(a.sum / n);
    if (has_intensity) out.intensity.push_back(a.intensity_sum / n);
  }
  return out;
}

}  // namespace crossreg
