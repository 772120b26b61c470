#include "crossreg/match/densematch.hpp"

#include "crossreg/common/mathutil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace crossreg::match {

void MatchConfig::validate() const {
  if (sinkhorn_iterations < 1) throw std::invalid_argument("sinkhorn iterations must be >= 1");
  if (k_prime < 1) throw std::invalid_argument("k_prime must be >= 1");
  if (std::isnan(slack_alpha) || slack_alpha == std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("slack alpha must be finite or -inf");
  }
}

MatX build_group_similarity(const MatX& feat_src, const MatX& feat_tgt, int dim) {
  if (feat_src.rows() == 0 || feat_tgt.rows() == 0) {
    throw std::invalid_argument("empty feature group");
  }
  if (feat_src.cols() != feat_tgt.cols() || feat_src.cols() != dim) {
    throw std::invalid_argument("feature group dims disagree");
  }
  return feat_src * feat_tgt.transpose() / static_cast<double>(dim);
}

MatX augment_slack(const MatX& s, double alpha) {
  MatX out(s.rows() + 1, s.cols() + 1);
  out.topLeftCorner(s.rows(), s.cols()) = s;
  out.row(s.rows()).setConstant(alpha);
  out.col(s.cols()).setConstant(alpha);
  return out;
}

MatX sinkhorn(const MatX& slack_augmented, int iterations) {
  if (iterations < 1) throw std::invalid_argument("sinkhorn iterations must be >= 1");
  const Eigen::Index m = slack_augmented.rows() - 1;
  const Eigen::Index n = slack_augmented.cols() - 1;
  if (m < 1 || n < 1) throw std::invalid_argument("sinkhorn needs at least a 2x2 matrix");
  for (Eigen::Index i = 0; i <= m; ++i) {
    for (Eigen::Index j = 0; j <= n; ++j) {
      const double v = slack_augmented(i, j);
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        throw std::invalid_argument("sinkhorn scores must not contain NaN or +inf");
      }
    }
  }

  // Log-domain scaling: u over interior rows, v over interior columns; the
  // slack factors stay pinned at zero.
  VecX u = VecX::Zero(m + 1);
  VecX v = VecX::Zero(n + 1);
  VecX tmp_row(n + 1);
  VecX tmp_col(m + 1);
  for (int it = 0; it < iterations; ++it) {
    for (Eigen::Index i = 0; i < m; ++i) {
      tmp_row = slack_augmented.row(i).transpose() + v;
      u[i] = -logsumexp(tmp_row);
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      tmp_col = slack_augmented.col(j) + u;
      v[j] = -logsumexp(tmp_col);
    }
  }

  MatX out(m + 1, n + 1);
  for (Eigen::Index i = 0; i <= m; ++i) {
    for (Eigen::Index j = 0; j <= n; ++j) {
      const double l = slack_augmented(i, j) + u[i] + v[j];
      out(i, j) = std::isfinite(l) ? std::exp(l) : 0.0;
    }
  }
  return out;
}

double marginal_deviation(const MatX& assignment) {
  const Eigen::Index m = assignment.rows() - 1;
  const Eigen::Index n = assignment.cols() - 1;
  double dev = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    dev = std::max(dev, std::abs(assignment.row(i).sum() - 1.0));
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    dev = std::max(dev, std::abs(assignment.col(j).sum() - 1.0));
  }
  return dev;
}

CorrespondenceSet extract_group_matches(const MatX& assignment, int k_prime,
                                        const std::vector<int>& rows_to_global,
                                        const std::vector<int>& cols_to_global,
                                        double min_confidence) {
  if (k_prime < 1) throw std::invalid_argument("k_prime must be >= 1");
  const Eigen::Index m = assignment.rows() - 1;
  const Eigen::Index n = assignment.cols() - 1;
  if (static_cast<Eigen::Index>(rows_to_global.size()) != m ||
      static_cast<Eigen::Index>(cols_to_global.size()) != n) {
    throw std::invalid_argument("index map sizes do not match the assignment");
  }
  struct Entry {
    double value;
    int row, col;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(m) * n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      entries.push_back({assignment(i, j), static_cast<int>(i), static_cast<int>(j)});
    }
  }
  const auto better = [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  };
  const std::size_t take = std::min<std::size_t>(entries.size(), static_cast<std::size_t>(k_prime));
  std::partial_sort(entries.begin(), entries.begin() + take, entries.end(), better);

  CorrespondenceSet c;
  c.granularity = MatchGranularity::kDense;
  for (std::size_t t = 0; t < take; ++t) {
    if (entries[t].value < min_confidence) break;  // sorted descending
    c.add(rows_to_global[entries[t].row], cols_to_global[entries[t].col], entries[t].value);
  }
  return c;
}

CorrespondenceSet aggregate(const std::vector<CorrespondenceSet>& groups) {
  std::map<std::pair<int, int>, double> merged;
  for (const CorrespondenceSet& g : groups) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      auto [it, inserted] = merged.emplace(g.pairs[k], g.confidence[k]);
      if (!inserted) it->second = std::max(it->second, g.confidence[k]);
    }
  }
  CorrespondenceSet c;
  c.granularity = MatchGranularity::kDense;
  for (const auto& [pair, conf] : merged) c.add(pair.first, pair.second, conf);
  return c;
}

}  // namespace crossreg::match
