#include <CLI11.hpp>

#include "crossreg/core/metrics.hpp"
#include "crossreg/io/config_file.hpp"
#include "crossreg/io/meta.hpp"
#include "crossreg/io/pgm.hpp"
#include "crossreg/io/ply.hpp"
#include "crossreg/io/records.hpp"
#include "crossreg/pipeline/pipeline.hpp"
#include "crossreg/selftest/selftest.hpp"
#include "crossreg/sim/pair.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace crossreg;

namespace {

constexpr const char* kVersion = "crossreg 0.1.0";

// Exit codes: 0 success, 1 partial/check failure, 2 I/O, 3 config/usage,
// 4 parse, 5 empty input.
enum ExitCode { kOk = 0, kPartial = 1, kIo = 2, kConfig = 3, kParse = 4, kEmpty = 5 };

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

sim::SuiteParams suite_from_config(const io::Config& cfg) {
  sim::SuiteParams p = sim::standard_suite();
  p.pair_count = cfg.get_int("suite.pairs", p.pair_count);
  p.seed = static_cast<std::uint64_t>(cfg.get_double("suite.seed", static_cast<double>(p.seed)));
  p.noise_sigma = cfg.get_double("suite.noise_sigma", p.noise_sigma);
  p.outlier_fraction = cfg.get_double("suite.outlier_fraction", p.outlier_fraction);
  p.dropout_fraction = cfg.get_double("suite.dropout_fraction", p.dropout_fraction);
  p.overlap_min = cfg.get_double("suite.overlap_min", p.overlap_min);
  p.overlap_max = cfg.get_double("suite.overlap_max", p.overlap_max);
  return p;
}

pipeline::PipelineConfig pipeline_from_config(const io::Config& cfg) {
  pipeline::PipelineConfig p;
  p.encoder.dense_dim = cfg.get_int("encoder.dense_dim", p.encoder.dense_dim);
  p.encoder.super_dim = cfg.get_int("encoder.super_dim", p.encoder.super_dim);
  p.encoder.unified_dim = cfg.get_int("encoder.unified_dim", p.encoder.unified_dim);
  p.encoder.image_depths = cfg.get_int("encoder.image_depths", p.encoder.image_depths);
  p.omp.lambda = cfg.get_double("omp.lambda", p.omp.lambda);
  p.omp.heads = cfg.get_int("omp.heads", p.omp.heads);
  p.omp.gt_radius = cfg.get_double("omp.gt_radius", p.omp.gt_radius);
  p.omp_weights_path = cfg.get("omp.weights", "");
  p.vgam.top_k = cfg.get_int("vgam.top_k", p.vgam.top_k);
  p.vgam.top_k_fraction = cfg.get_double("vgam.top_k_fraction", p.vgam.top_k_fraction);
  p.vgam.repeats = cfg.get_int("vgam.repeats", p.vgam.repeats);
  p.vgam_weights_path = cfg.get("vgam.weights", "");
  p.match.slack_alpha = cfg.get_double("match.slack_alpha", p.match.slack_alpha);
  p.match.sinkhorn_iterations = cfg.get_int("match.sinkhorn_iterations", p.match.sinkhorn_iterations);
  p.match.k_prime = cfg.get_int("match.k_prime", p.match.k_prime);
  p.match.min_confidence = cfg.get_double("match.min_confidence", p.match.min_confidence);
  p.estimator.kind = est::estimator_from_name(cfg.get("estimator.kind", "lgr"));
  p.estimator.ransac_iterations = cfg.get_int("estimator.ransac_iterations", p.estimator.ransac_iterations);
  p.estimator.ransac_inlier_threshold =
      cfg.get_double("estimator.ransac_inlier_threshold", p.estimator.ransac_inlier_threshold);
  p.estimator.seed = static_cast<std::uint64_t>(
      cfg.get_double("estimator.seed", static_cast<double>(p.estimator.seed)));
  p.estimator.lgr_refine_iterations =
      cfg.get_int("estimator.lgr_refine_iterations", p.estimator.lgr_refine_iterations);
  p.estimator.lgr_inlier_threshold =
      cfg.get_double("estimator.lgr_inlier_threshold", p.estimator.lgr_inlier_threshold);
  p.use_omp = cfg.get_bool("pipeline.use_omp", p.use_omp);
  p.attention = pipeline::attention_mode_from_name(
      cfg.get("pipeline.attention", pipeline::attention_mode_name(p.attention)));
  p.mask_source = pipeline::mask_source_from_name(
      cfg.get("pipeline.mask_source", pipeline::mask_source_name(p.mask_source)));
  return p;
}

void snapshot_suite(io::Config& cfg, const sim::SuiteParams& p) {
  cfg.set("suite.pairs", std::to_string(p.pair_count));
  cfg.set("suite.seed", std::to_string(p.seed));
  cfg.set("suite.noise_sigma", fmt_double(p.noise_sigma));
  cfg.set("suite.outlier_fraction", fmt_double(p.outlier_fraction));
  cfg.set("suite.dropout_fraction", fmt_double(p.dropout_fraction));
  cfg.set("suite.overlap_min", fmt_double(p.overlap_min));
  cfg.set("suite.overlap_max", fmt_double(p.overlap_max));
}

void snapshot_pipeline(io::Config& cfg, const pipeline::PipelineConfig& p) {
  cfg.set("encoder.dense_dim", std::to_string(p.encoder.dense_dim));
  cfg.set("encoder.super_dim", std::to_string(p.encoder.super_dim));
  cfg.set("encoder.unified_dim", std::to_string(p.encoder.unified_dim));
  cfg.set("encoder.image_depths", std::to_string(p.encoder.image_depths));
  cfg.set("omp.lambda", fmt_double(p.omp.lambda));
  cfg.set("omp.heads", std::to_string(p.omp.heads));
  cfg.set("omp.gt_radius", fmt_double(p.omp.gt_radius));
  cfg.set("vgam.top_k", std::to_string(p.vgam.top_k));
  cfg.set("vgam.top_k_fraction", fmt_double(p.vgam.top_k_fraction));
  cfg.set("vgam.repeats", std::to_string(p.vgam.repeats));
  cfg.set("match.slack_alpha", fmt_double(p.match.slack_alpha));
  cfg.set("match.sinkhorn_iterations", std::to_string(p.match.sinkhorn_iterations));
  cfg.set("match.k_prime", std::to_string(p.match.k_prime));
  cfg.set("match.min_confidence", fmt_double(p.match.min_confidence));
  cfg.set("estimator.kind", est::estimator_name(p.estimator.kind));
  cfg.set("estimator.ransac_iterations", std::to_string(p.estimator.ransac_iterations));
  cfg.set("estimator.ransac_inlier_threshold", fmt_double(p.estimator.ransac_inlier_threshold));
  cfg.set("estimator.seed", std::to_string(p.estimator.seed));
  cfg.set("estimator.lgr_refine_iterations", std::to_string(p.estimator.lgr_refine_iterations));
  cfg.set("estimator.lgr_inlier_threshold", fmt_double(p.estimator.lgr_inlier_threshold));
  cfg.set("pipeline.use_omp", p.use_omp ? "true" : "false");
  cfg.set("pipeline.attention", pipeline::attention_mode_name(p.attention));
  cfg.set("pipeline.mask_source", pipeline::mask_source_name(p.mask_source));
}

void write_manifest(const fs::path& path, const std::string& command,
                    const std::string& input, const std::string& output,
                    std::uint64_t seed, int pairs, double wall_ms,
                    const io::Config& snapshot) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
  out << "tool = " << kVersion << "\n"
      << "command = " << command << "\n"
      << "input = " << input << "\n"
      << "output = " << output << "\n"
      << "seed = " << seed << "\n"
      << "pairs = " << pairs << "\n"
      << "wall_ms = " << fmt_double(wall_ms) << "\n"
      << "\n# config snapshot\n"
      << snapshot.serialize();
}

void write_pair_dir(const fs::path& dir, const sim::ScenePair& pair, std::uint64_t seed) {
  fs::create_directories(dir);
  io::write_ply((dir / "source.ply").string(), pair.source);
  io::write_ply((dir / "target.ply").string(), pair.target);
  io::write_pgm((dir / "view.pgm").string(), pair.image);
  io::PairMeta meta;
  meta.gt = pair.gt;
  meta.overlap = pair.overlap;
  meta.seed = seed;
  io::write_meta((dir / "meta.txt").string(), meta);
}

sim::ScenePair load_pair_dir(const fs::path& dir) {
  sim::ScenePair pair;
  pair.source = io::read_ply((dir / "source.ply").string());
  pair.target = io::read_ply((dir / "target.ply").string());
  const io::PairMeta meta = io::read_meta((dir / "meta.txt").string());
  pair.gt = meta.gt;
  pair.overlap = meta.overlap;
  if (fs::exists(dir / "view.pgm")) {
    pair.image = io::read_pgm((dir / "view.pgm").string());
  }
  return pair;
}

std::vector<fs::path> find_pair_dirs(const fs::path& input) {
  std::vector<fs::path> dirs;
  if (fs::exists(input / "meta.txt")) {
    dirs.push_back(input);
    return dirs;
  }
  for (const auto& entry : fs::directory_iterator(input)) {
    if (entry.is_directory() && entry.path().filename().string().rfind("pair_", 0) == 0) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

int cmd_gen(const std::string& config_path, const std::string& out_dir, int count,
            std::optional<std::uint64_t> seed_override) {
  const auto t0 = std::chrono::steady_clock::now();
  io::Config file_cfg;
  if (!config_path.empty()) file_cfg = io::Config::load(config_path);
  sim::SuiteParams params = suite_from_config(file_cfg);
  if (count > 0) params.pair_count = count;
  if (seed_override) params.seed = *seed_override;

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    std::cerr << "error: cannot create output directory " << out_dir << "\n";
    return kIo;
  }
  {
    std::ofstream probe(fs::path(out_dir) / ".write_probe", std::ios::trunc);
    if (!probe) {
      std::cerr << "error: output directory not writable: " << out_dir << "\n";
      return kIo;
    }
  }
  fs::remove(fs::path(out_dir) / ".write_probe");

  int failures = 0;
  for (int k = 0; k < params.pair_count; ++k) {
    const sim::SuitePairSpec spec = sim::suite_pair_spec(params, k);
    char name[32];
    std::snprintf(name, sizeof(name), "pair_%04d", k);
    try {
      const sim::ScenePair pair = sim::make_pair(spec.scene, spec.config, spec.gt);
      write_pair_dir(fs::path(out_dir) / name, pair, spec.config.seed);
      std::cout << name << ": overlap " << fmt_double(pair.overlap) << ", "
                << pair.source.size() << " source / " << pair.target.size()
                << " target points\n";
    } catch (const std::exception& e) {
      std::cerr << name << ": generation failed: " << e.what() << "\n";
      ++failures;
    }
  }

  io::Config snapshot;
  snapshot_suite(snapshot, params);
  const double wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
  write_manifest(fs::path(out_dir) / "manifest.txt", "gen", config_path, out_dir,
                 params.seed, params.pair_count, wall_ms, snapshot);
  return failures == 0 ? kOk : kPartial;
}

io::RecordTable records_from_report(const pipeline::BenchmarkReport& report) {
  io::RecordTable table;
  table.header = {"pair", "estimator", "rre_deg", "rte_m", "success", "ir",
                  "superpoint_matches", "dense_matches", "mask_kept_src",
                  "mask_total_src", "mask_kept_tgt", "mask_total_tgt",
                  "fallback_unmasked", "inliers", "mean_residual", "error"};
  for (const auto& out : report.outcomes) {
    std::vector<std::string> row;
    row.push_back(std::to_string(out.pair_id));
    row.push_back(out.estimator);
    if (out.errored || !out.result.metrics) {
      row.insert(row.end(), {"nan", "nan", "0", "nan"});
    } else {
      row.push_back(fmt_double(out.result.metrics->rre_deg));
      row.push_back(fmt_double(out.result.metrics->rte_m));
      row.push_back(out.result.metrics->success ? "1" : "0");
      row.push_back(fmt_double(out.result.metrics->inlier_ratio));
    }
    row.push_back(std::to_string(out.result.superpoint_matches));
    row.push_back(std::to_string(out.result.dense_matches));
    row.push_back(std::to_string(out.result.mask_kept_src));
    row.push_back(std::to_string(out.result.mask_total_src));
    row.push_back(std::to_string(out.result.mask_kept_tgt));
    row.push_back(std::to_string(out.result.mask_total_tgt));
    row.push_back(out.result.fallback_unmasked ? "1" : "0");
    row.push_back(std::to_string(out.result.pose.inlier_count));
    row.push_back(fmt_double(out.result.pose.mean_residual));
    row.push_back(out.errored ? out.error : "");
    table.rows.push_back(std::move(row));
  }
  return table;
}

int cmd_register(const std::string& input, const std::string& config_path,
                 const std::string& estimator_flag, bool no_omp,
                 const std::string& attention_flag, const std::string& mask_flag,
                 const std::string& out_dir, std::optional<std::uint64_t> seed_override,
                 int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  io::Config file_cfg;
  if (!config_path.empty()) file_cfg = io::Config::load(config_path);
  pipeline::PipelineConfig cfg = pipeline_from_config(file_cfg);
  if (no_omp) cfg.use_omp = false;
  if (!attention_flag.empty()) cfg.attention = pipeline::attention_mode_from_name(attention_flag);
  if (!mask_flag.empty()) cfg.mask_source = pipeline::mask_source_from_name(mask_flag);
  if (seed_override) cfg.estimator.seed = *seed_override;

  pipeline::BenchmarkOptions opt;
  opt.threads = threads;
  if (estimator_flag == "all") {
    opt.estimators = {est::EstimatorKind::kWeightedSvd, est::EstimatorKind::kRansac,
                      est::EstimatorKind::kLgr};
  } else if (!estimator_flag.empty()) {
    opt.estimators = {est::estimator_from_name(estimator_flag)};
    cfg.estimator.kind = opt.estimators[0];
  } else {
    opt.estimators = {cfg.estimator.kind};
  }

  const std::vector<fs::path> dirs = find_pair_dirs(input);
  if (dirs.empty()) {
    std::cerr << "error: no pair directories under " << input << "\n";
    return kEmpty;
  }
  std::vector<sim::ScenePair> pairs;
  pairs.reserve(dirs.size());
  for (const fs::path& dir : dirs) pairs.push_back(load_pair_dir(dir));

  const pipeline::BenchmarkReport report = pipeline::run_benchmark(pairs, cfg, opt);
  const std::string table_text =
      pipeline::format_report_table(report, opt.rre_thresh_deg, opt.rte_thresh_m);
  std::cout << table_text;

  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
      std::cerr << "error: cannot create output directory " << out_dir << "\n";
      return kIo;
    }
    io::write_records((fs::path(out_dir) / "records.tsv").string(),
                      records_from_report(report));
    std::ofstream table_file(fs::path(out_dir) / "table.txt", std::ios::trunc);
    table_file << table_text;
    io::Config snapshot;
    snapshot_pipeline(snapshot, cfg);
    const double wall_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
    write_manifest(fs::path(out_dir) / "manifest.txt", "register", input, out_dir,
                   cfg.estimator.seed, static_cast<int>(pairs.size()), wall_ms, snapshot);
  }

  for (const auto& out : report.outcomes) {
    if (out.errored) return kPartial;
  }
  return kOk;
}

int cmd_eval(const std::string& records_path, double rre_thresh, double rte_thresh,
             bool sweep) {
  const io::RecordTable table = io::read_records(records_path);
  if (table.rows.empty()) {
    std::cerr << "error: no records in " << records_path << "\n";
    return kEmpty;
  }
  const int col_est = table.column("estimator");
  const int col_rre = table.column("rre_deg");
  const int col_rte = table.column("rte_m");
  const int col_ir = table.column("ir");
  if (col_est < 0 || col_rre < 0 || col_rte < 0 || col_ir < 0) {
    std::cerr << "error: records are missing required columns\n";
    return kParse;
  }

  std::vector<std::string> estimators;
  for (const auto& row : table.rows) {
    if (std::find(estimators.begin(), estimators.end(), row[col_est]) == estimators.end()) {
      estimators.push_back(row[col_est]);
    }
  }

  auto recall_for = [&](const std::string& estimator, double rre_t, double rte_t,
                        double* mean_ir) {
    int total = 0, ok = 0, evaluated = 0;
    double ir_sum = 0.0;
    for (const auto& row : table.rows) {
      if (row[col_est] != estimator) continue;
      ++total;
      const double r = std::atof(row[col_rre].c_str());
      const double t = std::atof(row[col_rte].c_str());
      const double ir = std::atof(row[col_ir].c_str());
      if (std::isnan(r) || std::isnan(t)) continue;
      ++evaluated;
      ir_sum += ir;
      if (r < rre_t && t < rte_t) ++ok;
    }
    if (mean_ir) *mean_ir = evaluated > 0 ? ir_sum / evaluated : 0.0;
    return total > 0 ? static_cast<double>(ok) / total : 0.0;
  };

  if (!sweep) {
    std::cout << "estimator\trr\tmean_ir\trre_thresh\trte_thresh\n";
    for (const auto& estimator : estimators) {
      double mean_ir = 0.0;
      const double rr = recall_for(estimator, rre_thresh, rte_thresh, &mean_ir);
      std::cout << estimator << "\t" << fmt_double(rr) << "\t" << fmt_double(mean_ir)
                << "\t" << fmt_double(rre_thresh) << "\t" << fmt_double(rte_thresh) << "\n";
    }
  } else {
    const std::vector<double> rre_grid = {0.5, 1.0, 2.0, 3.0, 5.0, 10.0};
    const std::vector<double> rte_grid = {0.1, 0.25, 0.5, 1.0, 2.0};
    std::cout << "estimator\trre_thresh\trte_thresh\trr\n";
    for (const auto& estimator : estimators) {
      for (double rre_t : rre_grid) {
        for (double rte_t : rte_grid) {
          std::cout << estimator << "\t" << fmt_double(rre_t) << "\t" << fmt_double(rte_t)
                    << "\t" << fmt_double(recall_for(estimator, rre_t, rte_t, nullptr))
                    << "\n";
        }
      }
    }
  }
  return kOk;
}

int cmd_selftest() {
  const auto results = selftest::run_selftest();
  bool all_ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name
              << (r.detail.empty() ? "" : ": " + r.detail) << "\n";
    all_ok = all_ok && r.passed;
  }
  std::cout << (all_ok ? "selftest: all checks passed\n" : "selftest: FAILURES\n");
  return all_ok ? kOk : kPartial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-source point cloud registration toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic scan-pair dataset");
  std::string gen_config, gen_out = "dataset";
  int gen_count = 0;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--config", gen_config, "Config file");
  gen->add_option("--out", gen_out, "Output directory");
  gen->add_option("--count", gen_count, "Number of pairs (overrides config)");
  gen->add_option("--seed", gen_seed, "Seed override");

  // register
  auto* reg = app.add_subcommand("register", "Register a pair directory or dataset");
  std::string reg_input, reg_config, reg_estimator, reg_attention, reg_mask, reg_out;
  bool reg_no_omp = false;
  int reg_threads = 0;
  std::optional<std::uint64_t> reg_seed;
  reg->add_option("input", reg_input, "Pair directory or dataset directory")->required();
  reg->add_option("--config", reg_config, "Config file");
  reg->add_option("--estimator", reg_estimator, "weighted_svd | ransac | lgr | all");
  reg->add_flag("--no-omp", reg_no_omp, "Disable the overlap mask stage");
  reg->add_option("--attention", reg_attention, "vanilla_self | geo_self | vgam_full");
  reg->add_option("--mask", reg_mask, "auto | predicted | gt");
  reg->add_option("--out", reg_out, "Output directory for records/table/manifest");
  reg->add_option("--seed", reg_seed, "Estimator seed override");
  reg->add_option("--threads", reg_threads, "Worker threads (0: auto)");

  // eval
  auto* eval = app.add_subcommand("eval", "Recompute metrics from records");
  std::string eval_records;
  double eval_rre = 2.0, eval_rte = 0.5;
  bool eval_sweep = false;
  eval->add_option("records", eval_records, "records.tsv path")->required();
  eval->add_option("--rre-thresh", eval_rre, "RRE threshold, degrees");
  eval->add_option("--rte-thresh", eval_rte, "RTE threshold, meters");
  eval->add_flag("--sweep", eval_sweep, "Emit a recall-vs-threshold grid");

  // selftest
  app.add_subcommand("selftest", "Run the embedded invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (app.got_subcommand("gen")) {
      return cmd_gen(gen_config, gen_out, gen_count, gen_seed);
    }
    if (app.got_subcommand("register")) {
      return cmd_register(reg_input, reg_config, reg_estimator, reg_no_omp, reg_attention,
                          reg_mask, reg_out, reg_seed, reg_threads);
    }
    if (app.got_subcommand("eval")) {
      return cmd_eval(eval_records, eval_rre, eval_rte, eval_sweep);
    }
    if (app.got_subcommand("selftest")) {
      return cmd_selftest();
    }
  } catch (const io::PlyParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPartial;
  }
  return kConfig;
}
