#pragma once

#include "crossreg/core/types.hpp"
#include "crossreg/omp/omp.hpp"

#include <optional>

namespace crossreg::loss {

struct LossConfig {
  double gamma = 2.0;  // focusing parameter
  double alpha = 0.25; // balancing parameter

  void validate() const;
};

struct LossReport {
  double loss = 0.0;
  VecX p_t;        // per-element true-class probability
  VecX gradient;   // dL/dp_i
};

/// Focal loss over the overlap mask: mean of -alpha (1 - p_t)^gamma ln(p_t),
/// p_t = p when the mask bit is set, 1 - p otherwise. Probabilities are
/// clamped to [1e-7, 1 - 1e-7] before the log.
LossReport focal_mask_loss(const VecX& p, const omp::OverlapMask& m_g,
                           const LossConfig& cfg);

/// Analytic dL/dp_i; matches central finite differences away from the clamps.
VecX focal_loss_gradient(const VecX& p, const omp::OverlapMask& m_g,
                         const LossConfig& cfg);

/// Sum of the provided components; coarse/fine arrive as external scalars.
double total_loss(double mask_loss, std::optional<double> coarse_loss = std::nullopt,
                  std::optional<double> fine_loss = std::nullopt);

}  // namespace crossreg::loss
