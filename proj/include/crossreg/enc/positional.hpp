#pragma once

#include "crossreg/core/types.hpp"

namespace crossreg::enc {

/// Sinusoidal positional encoding of n x a coordinates (a = 1, 2 or 3) into
/// n x dim. dim must be even. Every row has norm sqrt(dim / 2).
MatX positional_encoding(const MatX& coords, int dim, double min_wavelength = 0.5,
                         double max_wavelength = 64.0);

/// Encoding of 3D point positions (meter-scale wavelengths).
MatX point_positional_encoding(const std::vector<Vec3>& positions, int dim);

/// Encoding of pixel centers of an h x w grid, rows flattened row-major
/// (pixel-scale wavelengths).
MatX pixel_positional_encoding(int height, int width, int dim);

}  // namespace crossreg::enc
