#include "crossreg/enc/image_features.hpp"

#include "crossreg/common/mathutil.hpp"

#include <algorithm>
#include <stdexcept>

namespace crossreg::enc {

namespace {

// Box mean with clamp-to-edge borders via a summed-area table.
MatX box_filter(const MatX& v, int half) {
  const int h = static_cast<int>(v.rows());
  const int w = static_cast<int>(v.cols());
  MatX sat = MatX::Zero(h + 1, w + 1);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      sat(r + 1, c + 1) = v(r, c) + sat(r, c + 1) + sat(r + 1, c) - sat(r, c);
    }
  }
  MatX out(h, w);
  for (int r = 0; r < h; ++r) {
    const int r0 = std::max(0, r - half);
    const int r1 = std::min(h - 1, r + half);
    for (int c = 0; c < w; ++c) {
      const int c0 = std::max(0, c - half);
      const int c1 = std::min(w - 1, c + half);
      const double sum = sat(r1 + 1, c1 + 1) - sat(r0, c1 + 1) - sat(r1 + 1, c0) + sat(r0, c0);
      out(r, c) = sum / (static_cast<double>(r1 - r0 + 1) * (c1 - c0 + 1));
    }
  }
  return out;
}

}  // namespace

MatX image_raw_channels(const sim::ViewImage& img, int depths) {
  if (!img.valid()) throw std::invalid_argument("invalid view image");
  if (depths < 1) throw std::invalid_argument("image depths must be positive");
  const int h = img.height;
  const int w = img.width;
  const Eigen::Index n = static_cast<Eigen::Index>(h) * w;
  MatX raw = MatX::Zero(n, 1 + 3 * depths);
  raw.col(0).setConstant(0.25);
  for (int d = 0; d < depths; ++d) {
    const int half = 1 << d;
    const MatX boxed = box_filter(img.values, half);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const Eigen::Index px = static_cast<Eigen::Index>(r) * w + c;
        raw(px, 1 + 3 * d) = boxed(r, c);
        const int cl = std::max(0, c - 1);
        const int cr = std::min(w - 1, c + 1);
        raw(px, 2 + 3 * d) = 0.5 * (boxed(r, cr) - boxed(r, cl));
        const int ru = std::max(0, r - 1);
        const int rd = std::min(h - 1, r + 1);
        raw(px, 3 + 3 * d) = 0.5 * (boxed(rd, c) - boxed(ru, c));
      }
    }
  }
  return raw;
}

ImageFeatureGrid encode_image(const sim::ViewImage& img, const EncoderConfig& cfg) {
  cfg.validate();
  const MatX raw = image_raw_channels(img, cfg.image_depths);
  if (raw.cols() > cfg.unified_dim) {
    throw std::invalid_argument("unified dim too small for image channels");
  }
  ImageFeatureGrid grid;
  grid.height = img.height;
  grid.width = img.width;
  grid.features = MatX::Zero(raw.rows(), cfg.unified_dim);
  grid.features.leftCols(raw.cols()) = raw;
  l2_normalize_rows(grid.features);
  return grid;
}

}  // namespace crossreg::enc
