#include "crossreg/sim/degrade.hpp"

#include "crossreg/common/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crossreg::sim {

namespace {

// Fisher-Yates prefix: the first k slots hold a uniform k-subset.
std::vector<int> choose_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(static_cast<int>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(std::min(k, n));
  return idx;
}

Aabb bounds_of(const PointCloud& c) {
  Aabb b;
  if (c.empty()) return b;
  b.lo = c.points[0];
  b.hi = c.points[0];
  for (const Vec3& p : c.points) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  return b;
}

}  // namespace

void DegradationSpec::validate() const {
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise sigma must be non-negative");
  if (outlier_fraction < 0.0 || outlier_fraction > 1.0 || dropout_fraction < 0.0 ||
      dropout_fraction > 1.0) {
    throw std::invalid_argument("degradation fractions must lie in [0, 1]");
  }
}

PointCloud degrade(const PointCloud& c, const DegradationSpec& d) {
  d.validate();
  PointCloud out = c;
  if (out.empty()) return out;
  const std::size_t n = out.size();

  if (d.noise_sigma > 0.0) {
    Rng rng(mix_seed(d.seed, 1));
    for (Vec3& p : out.points) {
      p += Vec3(rng.normal(0.0, d.noise_sigma), rng.normal(0.0, d.noise_sigma),
                rng.normal(0.0, d.noise_sigma));
    }
  }

  if (d.outlier_fraction > 0.0) {
    const std::size_t k = static_cast<std::size_t>(std::llround(d.outlier_fraction * n));
    Rng rng(mix_seed(d.seed, 2));
    const Aabb vol = d.outlier_volume.empty() ? bounds_of(out) : d.outlier_volume;
    for (int i : choose_indices(n, k, rng)) {
      out.points[i] = Vec3(rng.uniform(vol.lo.x(), vol.hi.x()),
                           rng.uniform(vol.lo.y(), vol.hi.y()),
                           rng.uniform(vol.lo.z(), vol.hi.z()));
    }
  }

  if (d.dropout_fraction > 0.0) {
    const std::size_t k = static_cast<std::size_t>(std::llround(d.dropout_fraction * n));
    Rng rng(mix_seed(d.seed, 3));
    std::vector<int> drop = choose_indices(n, k, rng);
    std::vector<bool> dead(n, false);
    for (int i : drop) dead[i] = true;
    PointCloud kept;
    kept.points.reserve(n - drop.size());
    const bool has_intensity = out.intensity.size() == n;
    for (std::size_t i = 0; i < n; ++i) {
      if (dead[i]) continue;
      kept.points.push_back(out.points[i]);
      if (has_intensity) kept.intensity.push_back(out.intensity[i]);
    }
    out = std::move(kept);
  }

  return out;
}

}  // namespace crossreg::sim
