#pragma once

#include "crossreg/core/types.hpp"
#include "crossreg/omp/omp.hpp"

#include <string>
#include <vector>

namespace crossreg::vgam {

struct VgamConfig {
  int top_k = 256;              // cap on superpoint correspondences
  double top_k_fraction = 0.25; // also capped at this fraction of all pairs
  int repeats = 1;              // attention stack repetitions

  void validate() const;
  int effective_top_k(Eigen::Index rows, Eigen::Index cols) const;
};

/// Single-head projections for the visual cross attention (with positional
/// embeddings), the plain self attention, and the distance-biased geometric
/// self attention.
struct VgamWeights {
  MatX wq_c, wk_c, wv_c;  // d x d
  MatX we_c, wg_c;        // d x d, positional projections
  MatX wq_s, wk_s, wv_s;  // d x d
  MatX wq_g, wk_g, wv_g;  // d x d
  VecX dist_proj;         // d, projects the sinusoidal distance embedding to a logit bias

  int dim() const { return static_cast<int>(wq_c.rows()); }
  void validate() const;

  static VgamWeights default_weights(int d);

  void save(const std::string& path) const;  // magic "VGAW"
  static VgamWeights load(const std::string& path);
};

/// Superpoints surviving the overlap mask, with their original indices.
struct MaskedSuperpoints {
  std::vector<int> orig_index;
  std::vector<Vec3> positions;
  MatX features;

  Eigen::Index size() const { return features.rows(); }
};

/// Keeps exactly the mask = 1 superpoints in order. Throws
/// "empty overlap region" on an all-zero mask.
MaskedSuperpoints select_overlap_subset(const MatX& features,
                                        const std::vector<Vec3>& positions,
                                        const omp::OverlapMask& mask);

/// softmax((Q + E)(K + G)^T / sqrt(d)) (V + G) + F, with Q/E from the
/// superpoints and K/V/G from the flattened image features.
MatX visual_cross_attention(const MatX& f_super, const MatX& f_img, const MatX& pos_super,
                            const MatX& pos_img, const VgamWeights& w,
                            MatX* scores_out = nullptr);

/// softmax(Q K^T / sqrt(d)) V + F.
MatX self_attention(const MatX& f, const VgamWeights& w, MatX* scores_out = nullptr);

/// Self attention with a pairwise-distance logit bias
/// <sinusoidal(d_ij), dist_proj>; invariant to rigid motions of the positions.
MatX geometric_self_attention(const MatX& f, const std::vector<Vec3>& positions,
                              const VgamWeights& w, MatX* scores_out = nullptr);

/// Z_ij = exp(-|a_i - b_j|^2); entries in (0, 1].
MatX similarity_matrix(const MatX& feats_a, const MatX& feats_b);

/// Elementwise product of the row-wise and column-wise softmax.
MatX dual_normalize(const MatX& z);

/// The k globally largest entries; ties break by (row, col) lexicographic
/// order. Indices are mapped through the masked-subset index maps.
CorrespondenceSet topk_correspondences(const MatX& z_norm, int k,
                                       const std::vector<int>& src_map,
                                       const std::vector<int>& tgt_map);

}  // namespace crossreg::vgam
