#include "crossreg/vgam/vgam.hpp"

#include "crossreg/common/mathutil.hpp"
#include "crossreg/io/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crossreg::vgam {

namespace {

constexpr int kDistEncodingDim = 16;
constexpr double kDistMinWavelength = 0.5;
constexpr double kDistMaxWavelength = 64.0;

MatX scaled_identity(int n, double scale) {
  return scale * MatX::Identity(n, n);
}

void check_square(const MatX& m, int d, const char* name) {
  if (m.rows() != d || m.cols() != d) {
    throw std::invalid_argument(std::string("weight shape mismatch: ") + name);
  }
  if (!m.allFinite()) throw std::invalid_argument(std::string("non-finite weights: ") + name);
}

}  // namespace

void VgamConfig::validate() const {
  if (top_k < 1) throw std::invalid_argument("top_k must be positive");
  if (!(top_k_fraction > 0.0 && top_k_fraction <= 1.0)) {
    throw std::invalid_argument("top_k_fraction must lie in (0, 1]");
  }
  if (repeats < 1) throw std::invalid_argument("repeats must be positive");
}

int VgamConfig::effective_top_k(Eigen::Index rows, Eigen::Index cols) const {
  const double all = static_cast<double>(rows) * static_cast<double>(cols);
  const int frac = std::max(1, static_cast<int>(std::ceil(top_k_fraction * all)));
  return std::max(1, std::min(top_k, frac));
}

void VgamWeights::validate() const {
  const int d = dim();
  check_square(wq_c, d, "wq_c");
  check_square(wk_c, d, "wk_c");
  check_square(wv_c, d, "wv_c");
  check_square(we_c, d, "we_c");
  check_square(wg_c, d, "wg_c");
  check_square(wq_s, d, "wq_s");
  check_square(wk_s, d, "wk_s");
  check_square(wv_s, d, "wv_s");
  check_square(wq_g, d, "wq_g");
  check_square(wk_g, d, "wk_g");
  check_square(wv_g, d, "wv_g");
  if (dist_proj.size() != kDistEncodingDim || !dist_proj.allFinite()) {
    throw std::invalid_argument("distance projection shape mismatch");
  }
}

VgamWeights VgamWeights::default_weights(int d) {
  VgamWeights w;
  w.wq_c = scaled_identity(d, 1.0);
  w.wk_c = scaled_identity(d, 1.0);
  w.wv_c = scaled_identity(d, 0.1);
  w.we_c = MatX::Zero(d, d);
  w.wg_c = MatX::Zero(d, d);
  w.wq_s = scaled_identity(d, 1.0);
  w.wk_s = scaled_identity(d, 1.0);
  w.wv_s = scaled_identity(d, 0.1);
  w.wq_g = scaled_identity(d, 1.0);
  w.wk_g = scaled_identity(d, 1.0);
  w.wv_g = scaled_identity(d, 0.2);
  // Alternating decaying pattern: nearby pairs get a positive logit bias.
  w.dist_proj = VecX::Zero(kDistEncodingDim);
  for (int i = 0; i < kDistEncodingDim; ++i) {
    w.dist_proj[i] = (i % 2 == 1 ? 1.0 : 0.25) / (1.0 + i);
  }
  return w;
}

void VgamWeights::save(const std::string& path) const {
  io::WeightFile file;
  file.magic = {'V', 'G', 'A', 'W'};
  file.dims = {static_cast<std::uint32_t>(dim()),
               static_cast<std::uint32_t>(kDistEncodingDim)};
  file.matrices = {wq_c, wk_c, wv_c, we_c, wg_c, wq_s, wk_s, wv_s,
                   wq_g, wk_g, wv_g, dist_proj.transpose()};
  io::write_weight_file(path, file);
}

VgamWeights VgamWeights::load(const std::string& path) {
  const io::WeightFile file = io::read_weight_file(path, {'V', 'G', 'A', 'W'});
  if (file.matrices.size() != 12 || file.dims.size() != 2) {
    throw std::runtime_error("unexpected VGAM weight layout in " + path);
  }
  VgamWeights w;
  w.wq_c = file.matrices[0];
  w.wk_c = file.matrices[1];
  w.wv_c = file.matrices[2];
  w.we_c = file.matrices[3];
  w.wg_c = file.matrices[4];
  w.wq_s = file.matrices[5];
  w.wk_s = file.matrices[6];
  w.wv_s = file.matrices[7];
  w.wq_g = file.matrices[8];
  w.wk_g = file.matrices[9];
  w.wv_g = file.matrices[10];
  w.dist_proj = file.matrices[11].row(0).transpose();
  w.validate();
  return w;
}

MaskedSuperpoints select_overlap_subset(const MatX& features,
                                        const std::vector<Vec3>& positions,
                                        const omp::OverlapMask& mask) {
  if (static_cast<std::size_t>(features.rows()) != mask.size() ||
      positions.size() != mask.size()) {
    throw std::invalid_argument("mask length does not match superpoint count");
  }
  Eigen::Index kept = 0;
  for (std::uint8_t m : mask) kept += m ? 1 : 0;
  if (kept == 0) throw std::runtime_error("empty overlap region");

  MaskedSuperpoints out;
  out.orig_index.reserve(kept);
  out.positions.reserve(kept);
  out.features.resize(kept, features.cols());
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    out.orig_index.push_back(static_cast<int>(i));
    out.positions.push_back(positions[i]);
    out.features.row(row++) = features.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

MatX visual_cross_attention(const MatX& f_super, const MatX& f_img, const MatX& pos_super,
                            const MatX& pos_img, const VgamWeights& w, MatX* scores_out) {
  const int d = w.dim();
  if (f_super.cols() != d || f_img.cols() != d || pos_super.cols() != d ||
      pos_img.cols() != d || pos_super.rows() != f_super.rows() ||
      pos_img.rows() != f_img.rows()) {
    throw std::invalid_argument("visual cross attention shape mismatch");
  }
  const MatX q = f_super * w.wq_c;
  const MatX k = f_img * w.wk_c;
  const MatX v = f_img * w.wv_c;
  const MatX e = pos_super * w.we_c;
  const MatX g = pos_img * w.wg_c;
  const MatX scores =
      softmax_rows((q + e) * (k + g).transpose() / std::sqrt(static_cast<double>(d)));
  if (scores_out) *scores_out = scores;
  return scores * (v + g) + f_super;
}

MatX self_attention(const MatX& f, const VgamWeights& w, MatX* scores_out) {
  const int d = w.dim();
  if (f.cols() != d) throw std::invalid_argument("self attention shape mismatch");
  const MatX scores = softmax_rows((f * w.wq_s) * (f * w.wk_s).transpose() /
                                   std::sqrt(static_cast<double>(d)));
  if (scores_out) *scores_out = scores;
  return scores * (f * w.wv_s) + f;
}

MatX geometric_self_attention(const MatX& f, const std::vector<Vec3>& positions,
                              const VgamWeights& w, MatX* scores_out) {
  const int d = w.dim();
  if (f.cols() != d || static_cast<Eigen::Index>(positions.size()) != f.rows()) {
    throw std::invalid_argument("geometric self attention shape mismatch");
  }
  const Eigen::Index n = f.rows();
  MatX dist(n, 1);
  MatX bias(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      dist(j, 0) = (positions[i] - positions[j]).norm();
    }
    const MatX enc = sinusoidal_encoding(dist, kDistEncodingDim, kDistMinWavelength,
                                         kDistMaxWavelength);
    bias.row(i) = (enc * w.dist_proj).transpose();
  }
  const MatX logits = (f * w.wq_g) * (f * w.wk_g).transpose() /
                          std::sqrt(static_cast<double>(d)) +
                      bias;
  const MatX scores = softmax_rows(logits);
  if (scores_out) *scores_out = scores;
  return scores * (f * w.wv_g) + f;
}

MatX similarity_matrix(const MatX& feats_a, const MatX& feats_b) {
  if (feats_a.cols() != feats_b.cols()) {
    throw std::invalid_argument("similarity feature dims disagree");
  }
  MatX z(feats_a.rows(), feats_b.rows());
  for (Eigen::Index i = 0; i < feats_a.rows(); ++i) {
    for (Eigen::Index j = 0; j < feats_b.rows(); ++j) {
      z(i, j) = std::exp(-(feats_a.row(i) - feats_b.row(j)).squaredNorm());
    }
  }
  return z;
}

MatX dual_normalize(const MatX& z) {
  if (z.size() == 0) throw std::invalid_argument("empty similarity matrix");
  const MatX row_sm = softmax_rows(z);
  const MatX col_sm = softmax_rows(z.transpose()).transpose();
  return row_sm.cwiseProduct(col_sm);
}

CorrespondenceSet topk_correspondences(const MatX& z_norm, int k,
                                       const std::vector<int>& src_map,
                                       const std::vector<int>& tgt_map) {
  if (k < 1) throw std::invalid_argument("top-k must be positive");
  if (static_cast<Eigen::Index>(src_map.size()) != z_norm.rows() ||
      static_cast<Eigen::Index>(tgt_map.size()) != z_norm.cols()) {
    throw std::invalid_argument("index map sizes do not match the score matrix");
  }
  struct Entry {
    double value;
    int row, col;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(z_norm.size()));
  for (Eigen::Index i = 0; i < z_norm.rows(); ++i) {
    for (Eigen::Index j = 0; j < z_norm.cols(); ++j) {
      entries.push_back({z_norm(i, j), static_cast<int>(i), static_cast<int>(j)});
    }
  }
  const auto better = [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  };
  const std::size_t take = std::min<std::size_t>(entries.size(), static_cast<std::size_t>(k));
  std::partial_sort(entries.begin(), entries.begin() + take, entries.end(), better);

  CorrespondenceSet c;
  c.granularity = MatchGranularity::kSuperpoint;
  for (std::size_t t = 0; t < take; ++t) {
    c.add(src_map[entries[t].row], tgt_map[entries[t].col], entries[t].value);
  }
  return c;
}

}  // namespace crossreg::vgam
