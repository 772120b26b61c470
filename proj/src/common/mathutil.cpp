#include "crossreg/common/mathutil.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace crossreg {

MatX softmax_rows(const MatX& logits) {
  MatX out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    if (!std::isfinite(m)) {
      // All -inf: no mass to distribute.
      out.row(i).setZero();
      continue;
    }
    VecX e = (logits.row(i).array() - m).exp().matrix();
    out.row(i) = e.transpose() / e.sum();
  }
  return out;
}

double logsumexp(const VecX& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

MatX layer_norm_rows(const MatX& x, const VecX& gamma, const VecX& beta, double eps) {
  if (gamma.size() != x.cols() || beta.size() != x.cols()) {
    throw std::invalid_argument("layer norm parameter size mismatch");
  }
  MatX out(x.rows(), x.cols());
  const double n = static_cast<double>(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double mean = x.row(i).mean();
    const double var = (x.row(i).array() - mean).square().sum() / n;
    const double inv = 1.0 / std::sqrt(var + eps);
    out.row(i) =
        (((x.row(i).array() - mean) * inv) * gamma.transpose().array() +
         beta.transpose().array())
            .matrix();
  }
  return out;
}

void l2_normalize_rows(MatX& x, double min_norm) {
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double n = x.row(i).norm();
    if (n > min_norm) x.row(i) /= n;
  }
}

MatX sinusoidal_encoding(const MatX& coords, int dim, double min_wavelength,
                         double max_wavelength) {
  if (dim <= 0 || dim % 2 != 0) {
    throw std::invalid_argument("sinusoidal encoding dim must be positive and even");
  }
  if (coords.cols() < 1) {
    throw std::invalid_argument("sinusoidal encoding needs at least one coordinate axis");
  }
  const int axes = static_cast<int>(coords.cols());
  const int pairs = dim / 2;
  const int per_axis = (pairs + axes - 1) / axes;
  MatX out(coords.rows(), dim);
  for (int p = 0; p < pairs; ++p) {
    const int axis = p % axes;
    const int k = p / axes;
    double wl = min_wavelength;
    if (per_axis > 1) {
      const double t = static_cast<double>(k) / static_cast<double>(per_axis - 1);
      wl = min_wavelength * std::pow(max_wavelength / min_wavelength, t);
    }
    const double omega = 2.0 * std::numbers::pi / wl;
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
      const double phase = omega * coords(i, axis);
      out(i, 2 * p) = std::sin(phase);
      out(i, 2 * p + 1) = std::cos(phase);
    }
  }
  return out;
}

}  // namespace crossreg
