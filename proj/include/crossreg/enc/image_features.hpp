#pragma once

#include "crossreg/core/types.hpp"
#include "crossreg/enc/pyramid.hpp"
#include "crossreg/sim/image.hpp"

namespace crossreg::enc {

struct ImageFeatureGrid {
  int height = 0;
  int width = 0;
  MatX features;  // (height * width) x dim, pixels flattened row-major

  Eigen::Index pixels() const { return static_cast<Eigen::Index>(height) * width; }
};

/// Raw multi-scale channels before projection: per scale s in {1, 2, 4, ...}
/// the box-filtered value and its horizontal/vertical central differences,
/// plus a constant channel. Layout: [bias, mean_s, gx_s, gy_s, ...].
MatX image_raw_channels(const sim::ViewImage& img, int depths);

/// Per-pixel features: raw channels zero-padded to cfg.unified_dim and
/// L2-normalized.
ImageFeatureGrid encode_image(const sim::ViewImage& img, const EncoderConfig& cfg);

}  // namespace crossreg::enc
