// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evograph/baselines.hpp"
#include "evograph/evogen.hpp"
#include "evograph/smart.hpp"
#include "evograph/theory.hpp"

namespace evograph {

enum class GeneratorKind { ba, dual_ba };
enum class LabelModel { closeness, power };
enum class Backbone { linear_gcn, gcn };

struct GeneratorConfig {
  GeneratorKind kind = GeneratorKind::ba;
  std::size_t n0 = 1000;
  std::size_t m = 5;
  std::size_t m1 = 1;
  std::size_t m2 = 5;
  double p = 0.5;
  std::size_t horizon = 180;
  SeedGraph seed_graph = SeedGraph::ring;
  std::size_t feature_dim = 8;
};

struct LabelModelConfig {
  LabelModel kind = LabelModel::closeness;
  double alpha = 1.0;
  std::size_t col = 0;
};

struct MaskConfig {
  double fraction = 0.1;
  MaskPolicy policy = MaskPolicy::new_arrivals;
};

struct PretrainConfig {
  Backbone backbone = Backbone::linear_gcn;
  double label_fraction = 0.1;
  GcnTrainConfig gcn;
};

struct BaselineConfig {
  bool linear = true;
  bool doc = true;
  bool supervised = false;
  std::size_t supervised_epochs = 5;
  std::size_t supervised_window = 10;
};

struct TheoryConfig {
  GraphErrorVariant variant;
  std::optional<double> alpha;  // unset: power alpha, or the log-log degree exponent of frame-0 labels
  std::size_t seeds = 5;
};

struct DistortionRunConfig {
  DistortionConfig mc;
  std::size_t prefix_n0 = 30;
  std::size_t prefix_m = 2;
  std::size_t prefix_steps = 20;
  std::size_t taus = 10;
  /// -1 picks the highest-degree node of the prefix.
  long node = -1;
};

struct ExperimentConfig {
  std::optional<GeneratorConfig> generator;
  std::optional<std::filesystem::path> snapshot_dir;
  Task task = Task::regression;
  LabelModelConfig label_model;
  std::size_t t_deploy = 9;
  MaskConfig warmup_mask;
  PretrainConfig pretrain;
  smart::SmartConfig smart;
  BaselineConfig baselines;
  TheoryConfig theory;
  DistortionRunConfig distortion;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
};

/// Strict JSON parsing: unknown keys and wrong types are ConfigInvalid.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& cfg);
/// Resolved configuration with every default spelled out.
std::string echo_config(const ExperimentConfig& cfg);

/// Generated sequence with labels for every frame (generator track only).
EvolvingGraph generate_sequence(const ExperimentConfig& cfg, std::uint64_t seed);

struct MethodScore {
  std::string method;
  double mape = 0;
  double rmse = 0;
  double mae = 0;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<int> tau;
  std::vector<double> actual;
  std::vector<double> smart;
  std::vector<double> linear;      // empty when disabled
  std::vector<double> doc;         // empty when not applicable
  std::vector<double> supervised;  // empty unless flagged
  std::vector<double> theorem2;    // empty off the synthetic track
  std::vector<double> realized_error;
  std::vector<double> observed;    // warm-up losses, frames 0..t_deploy
  std::vector<MethodScore> scores;
  std::vector<AccessRecord> audit;
  std::size_t audit_violations = 0;
  double alpha_used = 0;
};

RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed);
/// Same run on an already generated, labelled sequence (lets callers share data).
RunResult run_on_sequence(const ExperimentConfig& cfg, const EvolvingGraph& g, std::uint64_t seed);

struct SummaryRow {
  std::string method;
  double mape = 0;
  double rmse = 0;
  double mae = 0;
  double se = 0;  // of MAPE across seeds
  std::size_t seeds = 0;
};

std::vector<SummaryRow> summarize(const std::vector<RunResult>& runs);
std::vector<RunResult> multi_seed(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds);

/// trace.csv, summary.csv, audit.csv and config.echo.json in `dir`; written
/// to a sibling temp directory first and renamed into place.
void write_run_report(const ExperimentConfig& cfg, const RunResult& run, const std::filesystem::path& dir);
void write_sweep_report(const ExperimentConfig& cfg, const std::vector<RunResult>& runs,
                        const std::filesystem::path& dir);

struct CurveRow {
  std::size_t tau = 0;
  double bound = 0;
  double estimate = 0;
  double se = 0;
};

/// Closed-form graph error against the realized relative error of the
/// frame-0 least-squares GCN, averaged over cfg.theory.seeds generated runs.
std::vector<CurveRow> theory_curve(const ExperimentConfig& cfg);
/// Distortion lower bound against its Monte-Carlo estimate on a BA prefix.
std::vector<CurveRow> distortion_curve(const ExperimentConfig& cfg);
void write_curve_csv(const std::vector<CurveRow>& rows, const std::filesystem::path& path);

struct TraceFile {
  std::vector<int> tau;
  std::vector<std::string> methods;
  std::vector<std::vector<double>> columns;  // NaN where empty
  std::vector<double> actual;
};

TraceFile read_trace_csv(const std::filesystem::path& path);
std::vector<MethodScore> score_trace(const TraceFile& trace);

}  // namespace evograph
