#include "crossreg/pipeline/pipeline.hpp"

#include "crossreg/core/search.hpp"
#include "crossreg/core/transform.hpp"
#include "crossreg/enc/positional.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace crossreg::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

[[noreturn]] void rethrow_with_stage(const char* stage, const std::exception& e) {
  throw std::runtime_error(std::string(stage) + ": " + e.what());
}

struct ModelWeights {
  omp::OmpWeights omp_w;
  vgam::VgamWeights vgam_w;
};

ModelWeights load_weights(const PipelineConfig& cfg) {
  ModelWeights w;
  if (cfg.omp_weights_path.empty()) {
    w.omp_w = omp::OmpWeights::default_weights(cfg.encoder.unified_dim,
                                               cfg.encoder.super_dim,
                                               cfg.encoder.unified_dim, cfg.omp.heads);
  } else {
    w.omp_w = omp::OmpWeights::load(cfg.omp_weights_path);
  }
  if (cfg.vgam_weights_path.empty()) {
    w.vgam_w = vgam::VgamWeights::default_weights(cfg.encoder.super_dim);
  } else {
    w.vgam_w = vgam::VgamWeights::load(cfg.vgam_weights_path);
  }
  return w;
}

omp::OverlapMask predict_mask(const enc::ImageFeatureGrid& img_grid,
                              const MatX& super_feats, const omp::OmpWeights& w,
                              double lambda) {
  const auto [aligned_img, aligned_super] = omp::align_features(img_grid, super_feats, w);
  const MatX fused = omp::fuse(aligned_super, aligned_img, w);
  const VecX prob = omp::predict_overlap_prob(fused, aligned_super, w);
  return omp::threshold_mask(prob, lambda);
}

MatX enhance_features(const vgam::MaskedSuperpoints& subset,
                      const enc::ImageFeatureGrid* img_grid, const MatX* pos_img,
                      const vgam::VgamWeights& w, AttentionMode mode, int repeats) {
  MatX f = subset.features;
  const MatX pos_super =
      enc::point_positional_encoding(subset.positions, static_cast<int>(f.cols()));
  for (int r = 0; r < repeats; ++r) {
    switch (mode) {
      case AttentionMode::kVanillaSelf:
        f = vgam::self_attention(f, w);
        break;
      case AttentionMode::kGeoSelf:
        f = vgam::geometric_self_attention(f, subset.positions, w);
        break;
      case AttentionMode::kVgamFull:
        if (img_grid) {
          f = vgam::visual_cross_attention(f, img_grid->features, pos_super, *pos_img, w);
        }
        f = vgam::self_attention(f, w);
        f = vgam::geometric_self_attention(f, subset.positions, w);
        break;
    }
  }
  return f;
}

}  // namespace

std::string attention_mode_name(AttentionMode mode) {
  switch (mode) {
    case AttentionMode::kVanillaSelf: return "vanilla_self";
    case AttentionMode::kGeoSelf: return "geo_self";
    case AttentionMode::kVgamFull: return "vgam_full";
  }
  return "unknown";
}

AttentionMode attention_mode_from_name(const std::string& name) {
  if (name == "vanilla_self") return AttentionMode::kVanillaSelf;
  if (name == "geo_self") return AttentionMode::kGeoSelf;
  if (name == "vgam_full") return AttentionMode::kVgamFull;
  throw std::invalid_argument("unknown attention mode: " + name);
}

std::string mask_source_name(MaskSource source) {
  switch (source) {
    case MaskSource::kAuto: return "auto";
    case MaskSource::kPredicted: return "predicted";
    case MaskSource::kGt: return "gt";
  }
  return "unknown";
}

MaskSource mask_source_from_name(const std::string& name) {
  if (name == "auto") return MaskSource::kAuto;
  if (name == "predicted") return MaskSource::kPredicted;
  if (name == "gt") return MaskSource::kGt;
  throw std::invalid_argument("unknown mask source: " + name);
}

void PipelineConfig::validate() const {
  encoder.validate();
  omp.validate();
  vgam.validate();
  match.validate();
  estimator.validate();
}

MatchingStages run_matching(const PointCloud& src, const PointCloud& tgt,
                            const sim::ViewImage* img, const PipelineConfig& cfg,
                            const RigidTransform* gt) {
  cfg.validate();
  MatchingStages st;
  const ModelWeights weights = load_weights(cfg);

  auto t0 = Clock::now();
  try {
    st.src_pyramid = enc::encode_point_pyramid(src, cfg.encoder);
    st.tgt_pyramid = enc::encode_point_pyramid(tgt, cfg.encoder);
  } catch (const std::exception& e) {
    rethrow_with_stage("encode", e);
  }
  st.timings.encode_ms = ms_since(t0);

  const auto& src_coarse = st.src_pyramid.coarse();
  const auto& tgt_coarse = st.tgt_pyramid.coarse();

  // Image features are needed by predicted masks and by the full attention
  // stack; encode once.
  std::optional<enc::ImageFeatureGrid> img_grid;
  if (img && img->valid()) {
    try {
      img_grid = enc::encode_image(*img, cfg.encoder);
    } catch (const std::exception& e) {
      rethrow_with_stage("encode", e);
    }
  }

  t0 = Clock::now();
  st.mask_src.assign(src_coarse.points.size(), 1);
  st.mask_tgt.assign(tgt_coarse.points.size(), 1);
  if (cfg.use_omp) {
    MaskSource source = cfg.mask_source;
    if (source == MaskSource::kAuto) {
      source = gt ? MaskSource::kGt : MaskSource::kPredicted;
    }
    try {
      if (source == MaskSource::kGt) {
        if (!gt) throw std::invalid_argument("gt mask source requires a ground-truth transform");
        auto masks = omp::gt_overlap_mask(src_coarse.points, tgt_coarse.points, *gt,
                                          cfg.omp.gt_radius);
        st.mask_src = std::move(masks.first);
        st.mask_tgt = std::move(masks.second);
      } else if (img_grid) {
        st.mask_src = predict_mask(*img_grid, src_coarse.features, weights.omp_w,
                                   cfg.omp.lambda);
        st.mask_tgt = predict_mask(*img_grid, tgt_coarse.features, weights.omp_w,
                                   cfg.omp.lambda);
      } else {
        st.fallback_unmasked = true;  // no image to predict from
      }
    } catch (const std::exception& e) {
      rethrow_with_stage("mask", e);
    }
    const bool src_empty =
        std::all_of(st.mask_src.begin(), st.mask_src.end(), [](auto m) { return m == 0; });
    const bool tgt_empty =
        std::all_of(st.mask_tgt.begin(), st.mask_tgt.end(), [](auto m) { return m == 0; });
    if (src_empty || tgt_empty) {
      st.mask_src.assign(src_coarse.points.size(), 1);
      st.mask_tgt.assign(tgt_coarse.points.size(), 1);
      st.fallback_unmasked = true;
    }
  }
  st.timings.mask_ms = ms_since(t0);

  t0 = Clock::now();
  try {
    const vgam::MaskedSuperpoints sub_src =
        vgam::select_overlap_subset(src_coarse.features, src_coarse.points.points, st.mask_src);
    const vgam::MaskedSuperpoints sub_tgt =
        vgam::select_overlap_subset(tgt_coarse.features, tgt_coarse.points.points, st.mask_tgt);

    const enc::ImageFeatureGrid* grid = nullptr;
    MatX pos_img;
    if (cfg.attention == AttentionMode::kVgamFull && img_grid) {
      grid = &*img_grid;
      pos_img = enc::pixel_positional_encoding(img_grid->height, img_grid->width,
                                               cfg.encoder.super_dim);
      st.used_image = true;
    }
    const MatX f_src = enhance_features(sub_src, grid, &pos_img, weights.vgam_w,
                                        cfg.attention, cfg.vgam.repeats);
    const MatX f_tgt = enhance_features(sub_tgt, grid, &pos_img, weights.vgam_w,
                                        cfg.attention, cfg.vgam.repeats);

    const MatX z = vgam::similarity_matrix(f_src, f_tgt);
    const MatX z_norm = vgam::dual_normalize(z);
    const int k = cfg.vgam.effective_top_k(z_norm.rows(), z_norm.cols());
    st.c_prime = vgam::topk_correspondences(z_norm, k, sub_src.orig_index, sub_tgt.orig_index);
  } catch (const std::exception& e) {
    rethrow_with_stage("superpoint_matching", e);
  }

  try {
    const auto& src_dense = st.src_pyramid.dense();
    const auto& tgt_dense = st.tgt_pyramid.dense();
    const std::vector<int> src_assign =
        point_to_node_group(src_dense.points, src_coarse.points);
    const std::vector<int> tgt_assign =
        point_to_node_group(tgt_dense.points, tgt_coarse.points);
    const auto src_groups = group_members(src_assign, src_coarse.points.size());
    const auto tgt_groups = group_members(tgt_assign, tgt_coarse.points.size());

    for (std::size_t l = 0; l < st.c_prime.size(); ++l) {
      const auto [si, tj] = st.c_prime.pairs[l];
      const std::vector<int>& gi = src_groups[si];
      const std::vector<int>& gj = tgt_groups[tj];
      if (gi.empty() || gj.empty()) continue;
      MatX fi(gi.size(), src_dense.features.cols());
      for (std::size_t r = 0; r < gi.size(); ++r) fi.row(r) = src_dense.features.row(gi[r]);
      MatX fj(gj.size(), tgt_dense.features.cols());
      for (std::size_t r = 0; r < gj.size(); ++r) fj.row(r) = tgt_dense.features.row(gj[r]);
      const MatX s = match::build_group_similarity(fi, fj, cfg.encoder.dense_dim);
      const MatX assignment = match::sinkhorn(match::augment_slack(s, cfg.match.slack_alpha),
                                              cfg.match.sinkhorn_iterations);
      st.groups.push_back(match::extract_group_matches(
          assignment, cfg.match.k_prime, gi, gj, cfg.match.min_confidence));
    }
    st.c_star = match::aggregate(st.groups);
  } catch (const std::exception& e) {
    rethrow_with_stage("dense_matching", e);
  }
  st.timings.match_ms = ms_since(t0);
  return st;
}

namespace {

RegistrationResult finalize_result(const MatchingStages& st, const PointCloud&,
                                   const PointCloud&, const PipelineConfig& cfg,
                                   const RigidTransform* gt, est::EstimatorKind kind) {
  RegistrationResult result;
  result.superpoint_matches = static_cast<int>(st.c_prime.size());
  result.dense_matches = static_cast<int>(st.c_star.size());
  result.mask_total_src = static_cast<int>(st.mask_src.size());
  result.mask_total_tgt = static_cast<int>(st.mask_tgt.size());
  for (auto m : st.mask_src) result.mask_kept_src += m ? 1 : 0;
  for (auto m : st.mask_tgt) result.mask_kept_tgt += m ? 1 : 0;
  result.fallback_unmasked = st.fallback_unmasked;
  result.used_image = st.used_image;
  result.timings = st.timings;

  const PointCloud& dense_src = st.src_pyramid.dense().points;
  const PointCloud& dense_tgt = st.tgt_pyramid.dense().points;

  const auto t0 = Clock::now();
  est::EstimatorConfig est_cfg = cfg.estimator;
  est_cfg.kind = kind;
  try {
    switch (kind) {
      case est::EstimatorKind::kWeightedSvd:
        result.pose = est::weighted_svd(st.c_star, dense_src, dense_tgt);
        break;
      case est::EstimatorKind::kRansac:
        result.pose = est::ransac(st.c_star, dense_src, dense_tgt, est_cfg);
        break;
      case est::EstimatorKind::kLgr:
        result.pose = est::lgr(st.groups, st.c_star, dense_src, dense_tgt, est_cfg);
        break;
    }
  } catch (const std::exception& e) {
    rethrow_with_stage("estimate", e);
  }
  result.timings.estimate_ms = ms_since(t0);

  if (gt) {
    RegistrationMetrics m;
    m.rre_deg = rre(result.pose.transform.rotation, gt->rotation);
    m.rte_m = rte(result.pose.transform.translation, gt->translation);
    m.success = m.rre_deg < 2.0 && m.rte_m < 0.5;
    m.inlier_ratio = inlier_ratio(st.c_star, dense_src, dense_tgt, *gt, 1.0);
    result.metrics = m;
  }
  return result;
}

}  // namespace

RegistrationResult register_pair(const PointCloud& src, const PointCloud& tgt,
                                 const sim::ViewImage* img, const PipelineConfig& cfg,
                                 const RigidTransform* gt) {
  const MatchingStages st = run_matching(src, tgt, img, cfg, gt);
  return finalize_result(st, src, tgt, cfg, gt, cfg.estimator.kind);
}

std::vector<RegistrationResult> register_pair_sweep(
    const PointCloud& src, const PointCloud& tgt, const sim::ViewImage* img,
    const PipelineConfig& cfg, const RigidTransform* gt,
    const std::vector<est::EstimatorKind>& kinds) {
  const MatchingStages st = run_matching(src, tgt, img, cfg, gt);
  std::vector<RegistrationResult> out;
  out.reserve(kinds.size());
  for (est::EstimatorKind kind : kinds) {
    out.push_back(finalize_result(st, src, tgt, cfg, gt, kind));
  }
  return out;
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CROSSREG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

BenchmarkReport run_benchmark(const std::vector<sim::ScenePair>& pairs,
                              const PipelineConfig& cfg, const BenchmarkOptions& opt) {
  if (pairs.empty()) throw std::invalid_argument("no pairs to register");
  if (opt.estimators.empty()) throw std::invalid_argument("no estimators selected");

  struct PairResult {
    std::vector<RegistrationResult> results;
    bool errored = false;
    std::string error;
  };
  std::vector<PairResult> per_pair(pairs.size());

  const int threads = std::min<int>(resolve_thread_count(opt.threads),
                                    static_cast<int>(pairs.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pairs.size()) break;
      try {
        per_pair[i].results = register_pair_sweep(pairs[i].source, pairs[i].target,
                                                  &pairs[i].image, cfg, &pairs[i].gt,
                                                  opt.estimators);
      } catch (const std::exception& e) {
        per_pair[i].errored = true;
        per_pair[i].error = e.what();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  BenchmarkReport report;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t e = 0; e < opt.estimators.size(); ++e) {
      PairOutcome out;
      out.pair_id = static_cast<int>(i);
      out.estimator = est::estimator_name(opt.estimators[e]);
      if (per_pair[i].errored) {
        out.errored = true;
        out.error = per_pair[i].error;
      } else {
        out.result = per_pair[i].results[e];
      }
      report.outcomes.push_back(std::move(out));
    }
  }

  for (est::EstimatorKind kind : opt.estimators) {
    BenchmarkRow row;
    row.estimator = est::estimator_name(kind);
    double rre_sum = 0.0, rte_sum = 0.0, ir_sum = 0.0;
    int successes = 0, evaluated = 0;
    for (const PairOutcome& out : report.outcomes) {
      if (out.estimator != row.estimator) continue;
      ++row.pairs;
      if (out.errored) {
        ++row.errored;
        continue;
      }
      const auto& m = out.result.metrics;
      if (!m) continue;
      ++evaluated;
      ir_sum += m->inlier_ratio;
      if (m->rre_deg < opt.rre_thresh_deg && m->rte_m < opt.rte_thresh_m) {
        ++successes;
        rre_sum += m->rre_deg;
        rte_sum += m->rte_m;
      }
    }
    row.rr = row.pairs > 0 ? static_cast<double>(successes) / row.pairs : 0.0;
    row.mean_rre_deg = successes > 0 ? rre_sum / successes : 0.0;
    row.mean_rte_m = successes > 0 ? rte_sum / successes : 0.0;
    row.mean_ir = evaluated > 0 ? ir_sum / evaluated : 0.0;
    report.rows.push_back(row);
  }
  return report;
}

std::string format_report_table(const BenchmarkReport& report, double rre_thresh,
                                double rte_thresh) {
  std::ostringstream out;
  out << "# mean RRE/RTE over successful pairs; RR at RRE < " << rre_thresh
      << " deg AND RTE < " << rte_thresh << " m (strict)\n";
  out << std::left << std::setw(14) << "estimator" << std::right << std::setw(10)
      << "pairs" << std::setw(10) << "errors" << std::setw(12) << "RRE(deg)"
      << std::setw(12) << "RTE(m)" << std::setw(10) << "RR" << std::setw(10) << "IR"
      << "\n";
  for (const BenchmarkRow& row : report.rows) {
    out << std::left << std::setw(14) << row.estimator << std::right << std::setw(10)
        << row.pairs << std::setw(10) << row.errored << std::setw(12) << std::fixed
        << std::setprecision(3) << row.mean_rre_deg << std::setw(12) << row.mean_rte_m
        << std::setw(10) << std::setprecision(3) << row.rr << std::setw(10)
        << row.mean_ir << "\n";
    out.unsetf(std::ios::fixed);
  }
  return out.str();
}

}  // namespace crossreg::pipeline
