#pragma once

#include "crossreg/core/metrics.hpp"
#include "crossreg/core/types.hpp"
#include "crossreg/enc/image_features.hpp"
#include "crossreg/enc/pyramid.hpp"
#include "crossreg/est/estimators.hpp"
#include "crossreg/match/densematch.hpp"
#include "crossreg/omp/omp.hpp"
#include "crossreg/sim/pair.hpp"
#include "crossreg/vgam/vgam.hpp"

#include <optional>
#include <string>
#include <vector>

namespace crossreg::pipeline {

enum class AttentionMode { kVanillaSelf, kGeoSelf, kVgamFull };

std::string attention_mode_name(AttentionMode mode);
AttentionMode attention_mode_from_name(const std::string& name);

/// Where overlap masks come from when OMP is enabled: the predictor network,
/// the ground-truth generator, or (auto) ground truth when available and the
/// predictor otherwise.
enum class MaskSource { kAuto, kPredicted, kGt };

std::string mask_source_name(MaskSource source);
MaskSource mask_source_from_name(const std::string& name);

struct PipelineConfig {
  enc::EncoderConfig encoder;
  omp::OmpConfig omp;
  std::string omp_weights_path;  // empty: built-in defaults
  vgam::VgamConfig vgam;
  std::string vgam_weights_path;
  match::MatchConfig match;
  est::EstimatorConfig estimator;
  bool use_omp = true;
  AttentionMode attention = AttentionMode::kVgamFull;
  MaskSource mask_source = MaskSource::kAuto;

  void validate() const;
};

struct StageTimings {
  double encode_ms = 0.0;
  double mask_ms = 0.0;
  double match_ms = 0.0;
  double estimate_ms = 0.0;
};

/// Everything up to the global dense correspondences; shared across
/// estimator sweeps.
struct MatchingStages {
  enc::FeaturePyramid src_pyramid;
  enc::FeaturePyramid tgt_pyramid;
  omp::OverlapMask mask_src;
  omp::OverlapMask mask_tgt;
  CorrespondenceSet c_prime;               // superpoint granularity
  std::vector<CorrespondenceSet> groups;   // per superpoint pair
  CorrespondenceSet c_star;                // dense granularity
  bool fallback_unmasked = false;
  bool used_image = false;
  StageTimings timings;
};

struct RegistrationResult {
  est::PoseEstimate pose;
  int superpoint_matches = 0;
  int dense_matches = 0;
  int mask_kept_src = 0;
  int mask_total_src = 0;
  int mask_kept_tgt = 0;
  int mask_total_tgt = 0;
  bool fallback_unmasked = false;
  bool used_image = false;
  std::optional<RegistrationMetrics> metrics;  // only when gt was supplied
  StageTimings timings;
};

/// Runs encode -> masks -> attention -> superpoint matching -> dense matching.
/// Stage failures are rethrown with the stage name prefixed.
MatchingStages run_matching(const PointCloud& src, const PointCloud& tgt,
                            const sim::ViewImage* img, const PipelineConfig& cfg,
                            const RigidTransform* gt);

RegistrationResult register_pair(const PointCloud& src, const PointCloud& tgt,
                                 const sim::ViewImage* img, const PipelineConfig& cfg,
                                 const RigidTransform* gt);

/// Shares the matching stages across several estimators (the dense
/// correspondences, and therefore IR, do not depend on the estimator).
std::vector<RegistrationResult> register_pair_sweep(
    const PointCloud& src, const PointCloud& tgt, const sim::ViewImage* img,
    const PipelineConfig& cfg, const RigidTransform* gt,
    const std::vector<est::EstimatorKind>& kinds);

struct BenchmarkOptions {
  std::vector<est::EstimatorKind> estimators = {est::EstimatorKind::kLgr};
  double rre_thresh_deg = 2.0;
  double rte_thresh_m = 0.5;
  int threads = 0;  // 0: CROSSREG_THREADS env or hardware concurrency
};

struct PairOutcome {
  int pair_id = 0;
  std::string estimator;
  bool errored = false;
  std::string error;
  RegistrationResult result;
};

struct BenchmarkRow {
  std::string estimator;
  int pairs = 0;
  int errored = 0;
  double mean_rre_deg = 0.0;  // over successful pairs
  double mean_rte_m = 0.0;    // over successful pairs
  double rr = 0.0;
  double mean_ir = 0.0;
};

struct BenchmarkReport {
  std::vector<PairOutcome> outcomes;  // ordered by (pair, estimator)
  std::vector<BenchmarkRow> rows;
};

/// Registers every pair (optionally in parallel), aggregates per estimator.
/// Mean errors are taken over successfully registered pairs only; errored
/// pairs count as recall failures.
BenchmarkReport run_benchmark(const std::vector<sim::ScenePair>& pairs,
                              const PipelineConfig& cfg, const BenchmarkOptions& opt);

/// Aligned plain-text table of the aggregate rows.
std::string format_report_table(const BenchmarkReport& report, double rre_thresh,
                                double rte_thresh);

int resolve_thread_count(int requested);

}  // namespace crossreg::pipeline
