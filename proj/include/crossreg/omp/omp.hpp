#pragma once

#include "crossreg/core/types.hpp"
#include "crossreg/enc/image_features.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace crossreg::omp {

using OverlapMask = std::vector<std::uint8_t>;

struct OmpConfig {
  double lambda = 0.5;     // confidence threshold, strict >
  int heads = 4;
  double gt_radius = 0.5;  // ground-truth correspondence radius, meters

  void validate() const;
};

/// Projections into the unified space, multi-head cross attention, a residual
/// FFN with layer normalization, and an MLP head producing one logit per
/// superpoint.
struct OmpWeights {
  MatX proj_img;    // d_img x d_u
  MatX proj_super;  // d_super x d_u
  MatX w_q, w_k, w_v, w_o;       // d_u x d_u
  MatX ffn_in;                   // d_u x ffn_hidden
  VecX ffn_b1;                   // ffn_hidden
  MatX ffn_out;                  // ffn_hidden x d_u
  VecX ffn_b2;                   // d_u
  VecX ln_gamma, ln_beta;        // d_u
  MatX mlp_in;                   // d_u x mlp_hidden
  VecX mlp_b1;                   // mlp_hidden
  VecX mlp_out;                  // mlp_hidden
  double mlp_b2 = 0.0;
  int heads = 4;

  int unified_dim() const { return static_cast<int>(proj_img.cols()); }
  void validate() const;

  /// Scaled-identity projections; the MLP head is zero so untrained
  /// probabilities sit at 0.5.
  static OmpWeights default_weights(int d_img, int d_super, int d_u, int heads = 4);

  void save(const std::string& path) const;  // magic "OMPW"
  static OmpWeights load(const std::string& path);
};

/// Linear projection of both modalities into the unified space.
/// Returns (image features flattened to pixels x d_u, superpoints x d_u).
std::pair<MatX, MatX> align_features(const enc::ImageFeatureGrid& f_img,
                                     const MatX& f_super, const OmpWeights& w);

/// Multi-head cross attention: queries from superpoints, keys/values from
/// pixels. Per-head attention rows sum to 1. Optional head_scores receives
/// one (supers x pixels) matrix per head.
MatX fuse(const MatX& aligned_super, const MatX& aligned_img, const OmpWeights& w,
          std::vector<MatX>* head_scores = nullptr);

/// sigmoid(MLP(F_fuse + FFN(F_fuse + F_super))); the FFN input is
/// layer-normalized. Outputs lie strictly in (0, 1).
VecX predict_overlap_prob(const MatX& fused, const MatX& aligned_super,
                          const OmpWeights& w);

/// mask[i] = 1 iff p[i] > lambda (strict).
OverlapMask threshold_mask(const VecX& prob, double lambda);

/// Ground-truth masks: a source superpoint is in-overlap iff its gt-mapped
/// position has a target superpoint strictly within `radius`; symmetrically
/// for the target. Throws on empty clouds.
std::pair<OverlapMask, OverlapMask> gt_overlap_mask(const PointCloud& supers_src,
                                                    const PointCloud& supers_tgt,
                                                    const RigidTransform& gt,
                                                    double radius);

}  // namespace crossreg::omp
