#include "crossreg/loss/focal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crossreg::loss {

namespace {

constexpr double kClamp = 1e-7;

double clamp_p(double p) { return std::clamp(p, kClamp, 1.0 - kClamp); }

// d/dq [-alpha (1-q)^gamma ln q]
double dloss_dpt(double q, double gamma, double alpha) {
  const double pow_g = std::pow(1.0 - q, gamma);
  const double pow_g1 = gamma > 0.0 ? gamma * std::pow(1.0 - q, gamma - 1.0) : 0.0;
  return alpha * (pow_g1 * std::log(q) - pow_g / q);
}

}  // namespace

void LossConfig::validate() const {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

LossReport focal_mask_loss(const VecX& p, const omp::OverlapMask& m_g,
                           const LossConfig& cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(p.size()) != m_g.size()) {
    throw std::invalid_argument("probability/mask length mismatch");
  }
  const Eigen::Index n = p.size();
  if (n == 0) throw std::invalid_argument("empty mask");

  LossReport report;
  report.p_t.resize(n);
  report.gradient.resize(n);
  double sum = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pc = clamp_p(p[i]);
    const bool positive = m_g[static_cast<std::size_t>(i)] != 0;
    const double pt = positive ? pc : 1.0 - pc;
    report.p_t[i] = pt;
    sum += -cfg.alpha * std::pow(1.0 - pt, cfg.gamma) * std::log(pt);
    const double g = dloss_dpt(pt, cfg.gamma, cfg.alpha) * inv_n;
    report.gradient[i] = positive ? g : -g;
  }
  report.loss = sum * inv_n;
  return report;
}

VecX focal_loss_gradient(const VecX& p, const omp::OverlapMask& m_g,
                         const LossConfig& cfg) {
  return focal_mask_loss(p, m_g, cfg).gradient;
}

double total_loss(double mask_loss, std::optional<double> coarse_loss,
                  std::optional<double> fine_loss) {
  return mask_loss + coarse_loss.value_or(0.0) + fine_loss.value_or(0.0);
}

}  // namespace crossreg::loss
