#include "crossreg/enc/positional.hpp"

#include "crossreg/common/mathutil.hpp"

#include <stdexcept>

namespace crossreg::enc {

MatX positional_encoding(const MatX& coords, int dim, double min_wavelength,
                         double max_wavelength) {
  if (dim <= 0 || dim % 2 != 0) {
    throw std::invalid_argument("positional encoding dim must be even");
  }
  return sinusoidal_encoding(coords, dim, min_wavelength, max_wavelength);
}

MatX point_positional_encoding(const std::vector<Vec3>& positions, int dim) {
  MatX coords(static_cast<Eigen::Index>(positions.size()), 3);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    coords.row(static_cast<Eigen::Index>(i)) = positions[i].transpose();
  }
  return positional_encoding(coords, dim, 0.5, 64.0);
}

MatX pixel_positional_encoding(int height, int width, int dim) {
  MatX coords(static_cast<Eigen::Index>(height) * width, 2);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      coords(static_cast<Eigen::Index>(r) * width + c, 0) = static_cast<double>(c);
      coords(static_cast<Eigen::Index>(r) * width + c, 1) = static_cast<double>(r);
    }
  }
  return positional_encoding(coords, dim, 2.0, 256.0);
}

}  // namespace crossreg::enc
