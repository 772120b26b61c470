#pragma once

#include "crossreg/core/types.hpp"

#include <cmath>
#include <numbers>

namespace crossreg {

/// Numerically stable row-wise softmax. -inf logits get zero mass.
MatX softmax_rows(const MatX& logits);

/// log(sum(exp(v))) with the usual max shift; handles -inf entries.
double logsumexp(const VecX& v);

/// Per-row layer normalization: gamma * (x - mean) / sqrt(var + eps) + beta.
MatX layer_norm_rows(const MatX& x, const VecX& gamma, const VecX& beta,
                     double eps = 1e-5);

/// Scales each row to unit L2 norm; rows with norm below min_norm are left as-is.
void l2_normalize_rows(MatX& x, double min_norm = 1e-12);

/// Sinusoidal encoding of n x a coordinates into n x dim (dim even).
/// Pairs (sin, cos) cycle through the axes; wavelengths are geometrically
/// spaced between min_wavelength and max_wavelength.
MatX sinusoidal_encoding(const MatX& coords, int dim, double min_wavelength,
                         double max_wavelength);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

}  // namespace crossreg
