#pragma once

#include "crossreg/core/types.hpp"

#include <vector>

namespace crossreg::match {

struct MatchConfig {
  double slack_alpha = 1.0;     // slack row/column fill; -inf disables the slack
  int sinkhorn_iterations = 100;
  int k_prime = 16;             // matches kept per group
  double min_confidence = 0.0;

  void validate() const;
};

/// S = (src features)(tgt features)^T / d, linear scaling by the feature dim.
/// The explicit dim must equal the feature column count.
MatX build_group_similarity(const MatX& feat_src, const MatX& feat_tgt, int dim);

/// Appends one slack row and column filled with alpha; corner included.
MatX augment_slack(const MatX& s, double alpha);

/// Log-domain Sinkhorn on exp(scores) for a slack-augmented (m+1) x (n+1)
/// matrix. Interior rows and columns are alternately normalized to sum 1
/// (their sums include the slack entry); the slack row/column are never
/// normalized in their own dimension. -inf scores carry zero mass; NaN or
/// +inf scores throw.
MatX sinkhorn(const MatX& slack_augmented, int iterations);

/// Max interior row/column sum deviation from 1; convergence measure.
double marginal_deviation(const MatX& assignment);

/// Drops the slack line, keeps the top k interior entries by assignment value
/// (ties by (row, col)), maps through the global dense index maps and filters
/// by the confidence floor.
CorrespondenceSet extract_group_matches(const MatX& assignment, int k_prime,
                                        const std::vector<int>& rows_to_global,
                                        const std::vector<int>& cols_to_global,
                                        double min_confidence = 0.0);

/// Union of per-group sets; duplicate pairs keep the maximum confidence.
/// Output is sorted by (source, target) so aggregation order cannot matter.
CorrespondenceSet aggregate(const std::vector<CorrespondenceSet>& groups);

}  // namespace crossreg::match
