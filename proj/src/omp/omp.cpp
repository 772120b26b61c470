#include "crossreg/omp/omp.hpp"

#include "crossreg/common/mathutil.hpp"
#include "crossreg/core/search.hpp"
#include "crossreg/io/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace crossreg::omp {

namespace {

MatX scaled_identity(int rows, int cols, double scale) {
  MatX m = MatX::Zero(rows, cols);
  const int k = std::min(rows, cols);
  for (int i = 0; i < k; ++i) m(i, i) = scale;
  return m;
}

}  // namespace

void OmpConfig::validate() const {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("confidence threshold must lie in (0, 1)");
  }
  if (heads < 1) throw std::invalid_argument("head count must be positive");
  if (!(gt_radius > 0.0)) throw std::invalid_argument("gt radius must be positive");
}

void OmpWeights::validate() const {
  const int d_u = unified_dim();
  if (proj_super.cols() != d_u) throw std::invalid_argument("projection dims disagree");
  for (const MatX* m : {&w_q, &w_k, &w_v, &w_o}) {
    if (m->rows() != d_u || m->cols() != d_u) {
      throw std::invalid_argument("attention weight shape mismatch");
    }
    if (!m->allFinite()) throw std::invalid_argument("non-finite attention weights");
  }
  if (heads < 1 || d_u % heads != 0) {
    throw std::invalid_argument("head count must divide the unified dim");
  }
  if (ffn_in.rows() != d_u || ffn_out.cols() != d_u || ffn_in.cols() != ffn_out.rows() ||
      ffn_b1.size() != ffn_in.cols() || ffn_b2.size() != d_u) {
    throw std::invalid_argument("ffn shape mismatch");
  }
  if (ln_gamma.size() != d_u || ln_beta.size() != d_u) {
    throw std::invalid_argument("layer norm shape mismatch");
  }
  if (mlp_in.rows() != d_u || mlp_b1.size() != mlp_in.cols() ||
      mlp_out.size() != mlp_in.cols()) {
    throw std::invalid_argument("mlp head shape mismatch");
  }
}

OmpWeights OmpWeights::default_weights(int d_img, int d_super, int d_u, int heads) {
  OmpWeights w;
  w.heads = heads;
  w.proj_img = scaled_identity(d_img, d_u, 1.0);
  w.proj_super = scaled_identity(d_super, d_u, 1.0);
  w.w_q = scaled_identity(d_u, d_u, 1.0);
  w.w_k = scaled_identity(d_u, d_u, 1.0);
  w.w_v = scaled_identity(d_u, d_u, 0.1);
  w.w_o = scaled_identity(d_u, d_u, 1.0);
  const int hidden = 2 * d_u;
  w.ffn_in = MatX::Zero(d_u, hidden);
  w.ffn_in.leftCols(d_u) = scaled_identity(d_u, d_u, 0.1);
  w.ffn_in.rightCols(d_u) = scaled_identity(d_u, d_u, 0.1);
  w.ffn_b1 = VecX::Zero(hidden);
  w.ffn_out = MatX::Zero(hidden, d_u);
  w.ffn_out.topRows(d_u) = scaled_identity(d_u, d_u, 0.1);
  w.ffn_b2 = VecX::Zero(d_u);
  w.ln_gamma = VecX::Ones(d_u);
  w.ln_beta = VecX::Zero(d_u);
  w.mlp_in = MatX::Zero(d_u, d_u);
  w.mlp_b1 = VecX::Zero(d_u);
  w.mlp_out = VecX::Zero(d_u);
  w.mlp_b2 = 0.0;
  return w;
}

void OmpWeights::save(const std::string& path) const {
  io::WeightFile file;
  file.magic = {'O', 'M', 'P', 'W'};
  file.dims = {static_cast<std::uint32_t>(proj_img.rows()),
               static_cast<std::uint32_t>(proj_super.rows()),
               static_cast<std::uint32_t>(unified_dim()),
               static_cast<std::uint32_t>(heads),
               static_cast<std::uint32_t>(ffn_in.cols()),
               static_cast<std::uint32_t>(mlp_in.cols())};
  file.matrices = {proj_img, proj_super, w_q,    w_k,
                   w_v,      w_o,        ffn_in, ffn_b1.transpose(),
                   ffn_out,  ffn_b2.transpose(), ln_gamma.transpose(),
                   ln_beta.transpose(), mlp_in, mlp_b1.transpose(),
                   mlp_out.transpose(), MatX::Constant(1, 1, mlp_b2)};
  io::write_weight_file(path, file);
}

OmpWeights OmpWeights::load(const std::string& path) {
  const io::WeightFile file = io::read_weight_file(path, {'O', 'M', 'P', 'W'});
  if (file.matrices.size() != 16 || file.dims.size() != 6) {
    throw std::runtime_error("unexpected OMP weight layout in " + path);
  }
  OmpWeights w;
  w.proj_img = file.matrices[0];
  w.proj_super = file.matrices[1];
  w.w_q = file.matrices[2];
  w.w_k = file.matrices[3];
  w.w_v = file.matrices[4];
  w.w_o = file.matrices[5];
  w.ffn_in = file.matrices[6];
  w.ffn_b1 = file.matrices[7].row(0).transpose();
  w.ffn_out = file.matrices[8];
  w.ffn_b2 = file.matrices[9].row(0).transpose();
  w.ln_gamma = file.matrices[10].row(0).transpose();
  w.ln_beta = file.matrices[11].row(0).transpose();
  w.mlp_in = file.matrices[12];
  w.mlp_b1 = file.matrices[13].row(0).transpose();
  w.mlp_out = file.matrices[14].row(0).transpose();
  w.mlp_b2 = file.matrices[15](0, 0);
  w.heads = static_cast<int>(file.dims[3]);
  w.validate();
  return w;
}

std::pair<MatX, MatX> align_features(const enc::ImageFeatureGrid& f_img,
                                     const MatX& f_super, const OmpWeights& w) {
  if (f_img.features.cols() != w.proj_img.rows() ||
      f_super.cols() != w.proj_super.rows()) {
    throw std::invalid_argument("feature dims do not match projection weights");
  }
  return {f_img.features * w.proj_img, f_super * w.proj_super};
}

MatX fuse(const MatX& aligned_super, const MatX& aligned_img, const OmpWeights& w,
          std::vector<MatX>* head_scores) {
  w.validate();
  const int d_u = w.unified_dim();
  if (aligned_super.cols() != d_u || aligned_img.cols() != d_u) {
    throw std::invalid_argument("aligned feature dim mismatch");
  }
  const int dh = d_u / w.heads;
  const MatX q = aligned_super * w.w_q;
  const MatX k = aligned_img * w.w_k;
  const MatX v = aligned_img * w.w_v;
  MatX concat(aligned_super.rows(), d_u);
  if (head_scores) head_scores->clear();
  for (int h = 0; h < w.heads; ++h) {
    const auto qh = q.middleCols(h * dh, dh);
    const auto kh = k.middleCols(h * dh, dh);
    const auto vh = v.middleCols(h * dh, dh);
    const MatX scores = softmax_rows(qh * kh.transpose() / std::sqrt(static_cast<double>(dh)));
    concat.middleCols(h * dh, dh) = scores * vh;
    if (head_scores) head_scores->push_back(scores);
  }
  return concat * w.w_o;
}

VecX predict_overlap_prob(const MatX& fused, const MatX& aligned_super,
                          const OmpWeights& w) {
  if (fused.rows() != aligned_super.rows() || fused.cols() != aligned_super.cols()) {
    throw std::invalid_argument("fused/superpoint feature shape mismatch");
  }
  const MatX residual_in = fused + aligned_super;
  const MatX normed = layer_norm_rows(residual_in, w.ln_gamma, w.ln_beta);
  const MatX hidden =
      ((normed * w.ffn_in).rowwise() + w.ffn_b1.transpose()).array().tanh().matrix();
  const MatX ffn = (hidden * w.ffn_out).rowwise() + w.ffn_b2.transpose();
  const MatX y = fused + ffn;
  const MatX m1 = ((y * w.mlp_in).rowwise() + w.mlp_b1.transpose()).array().tanh().matrix();
  VecX prob(fused.rows());
  for (Eigen::Index i = 0; i < prob.size(); ++i) {
    prob[i] = sigmoid(m1.row(i).dot(w.mlp_out) + w.mlp_b2);
  }
  return prob;
}

OverlapMask threshold_mask(const VecX& prob, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("confidence threshold must lie in (0, 1)");
  }
  OverlapMask mask(static_cast<std::size_t>(prob.size()));
  for (Eigen::Index i = 0; i < prob.size(); ++i) {
    mask[static_cast<std::size_t>(i)] = prob[i] > lambda ? 1 : 0;
  }
  return mask;
}

std::pair<OverlapMask, OverlapMask> gt_overlap_mask(const PointCloud& supers_src,
                                                    const PointCloud& supers_tgt,
                                                    const RigidTransform& gt,
                                                    double radius) {
  if (supers_src.empty() || supers_tgt.empty()) {
    throw std::invalid_argument("empty superpoint cloud");
  }
  if (!(radius > 0.0)) throw std::invalid_argument("gt radius must be positive");
  OverlapMask mask_src(supers_src.size(), 0);
  OverlapMask mask_tgt(supers_tgt.size(), 0);
  GridIndex tgt_index(supers_tgt, radius);
  for (std::size_t i = 0; i < supers_src.size(); ++i) {
    mask_src[i] = tgt_index.has_neighbor_within(gt * supers_src.points[i], radius) ? 1 : 0;
  }
  const RigidTransform inv = gt.inverse();
  GridIndex src_index(supers_src, radius);
  for (std::size_t j = 0; j < supers_tgt.size(); ++j) {
    mask_tgt[j] = src_index.has_neighbor_within(inv * supers_tgt.points[j], radius) ? 1 : 0;
  }
  return {mask_src, mask_tgt};
}

}  // namespace crossreg::omp
