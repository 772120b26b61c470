#include "crossreg/core/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace crossreg {

bool RigidTransform::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const Mat3 gram = rotation.transpose() * rotation;
  const double ortho_err = (gram - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det_err = std::abs(rotation.determinant() - 1.0);
  return ortho_err < tol && det_err < tol;
}

void RigidTransform::validate(double tol) const {
  if (!is_valid(tol)) {
    throw std::invalid_argument("rigid transform rotation is not in SO(3)");
  }
}

MatX to_matrix(const PointCloud& c) {
  MatX m(static_cast<Eigen::Index>(c.size()), 3);
  for (std::size_t i = 0; i < c.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = c.points[i].transpose();
  }
  return m;
}

void CorrespondenceSet::validate(std::size_t src_size, std::size_t tgt_size) const {
  if (confidence.size() != pairs.size()) {
    throw std::invalid_argument("correspondence confidences do not match pair count");
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= src_size ||
        static_cast<std::size_t>(j) >= tgt_size) {
      throw std::out_of_range("correspondence index out of bounds at pair " +
                              std::to_string(k));
    }
    const double c = confidence[k];
    if (!std::isfinite(c) || c < 0.0) {
      throw std::invalid_argument("correspondence confidence must be finite and non-negative");
    }
  }
}

}  // namespace crossreg
