#pragma once

// Experiment configuration, the method matrix, and result export.
//
// Methods: SMGD (pooled multi-gradient descent from random starts), linear
// scalarization, and predictor-corrector exploration with any solver / HVP
// mode pair. Costs are reported in gradient evaluations first and wall time
// second.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pareto_tracer/continuation.hpp"
#include "pareto_tracer/metrics.hpp"
#include "pareto_tracer/mgd.hpp"
#include "pareto_tracer/problem.hpp"

namespace pareto_tracer {

struct ProblemSpec {
  /// quadratic, fonseca_fleming or fairness.
  std::string name = "quadratic";
  /// Unset: 50 for quadratic, 3 for fonseca_fleming. Ignored for fairness (features + 1).
  std::optional<std::size_t> dimension;
  std::uint64_t seed = 0;
  /// Distance between the quadratic centers.
  double separation = 11.18;
  std::size_t samples = 500;
  std::size_t features = 20;
  double group_imbalance = 0.3;
  /// Optional fairness CSV; overrides the generator when set.
  std::string dataset;

  bool operator==(const ProblemSpec&) const = default;
};

std::unique_ptr<MooProblem> make_problem(const ProblemSpec& spec);

/// Dense samples of the true front when one is known (quadratic, Fonseca-Fleming).
std::optional<std::vector<ObjectiveVec>> reference_front(const ProblemSpec& spec, int resolution = 200000);

enum class MethodKind { kSmgd, kPc, kScalarization };

struct SmgdSettings {
  int init_count = 10;
  int epochs = 20;
  MgdConfig mgd;
};

enum class WarmStart {
  /// Multi-gradient descent. Can stall on any Pareto-critical point, including
  /// degenerate ones where one gradient vanishes without the other being optimal.
  kMgd,
  /// Gradient descent on (f1 + w f2) / (1 + w); its minimizers are Pareto optimal.
  kScalarized,
};

std::string to_string(WarmStart w);
WarmStart warm_start_from_string(const std::string& s);

struct PcSettings {
  WarmStart warm_start = WarmStart::kMgd;
  int warm_start_steps = 75;
  double warm_start_step = 0.005;
  /// Weight w of f2 for the scalarized warm start.
  double warm_start_weight = 1.0;
  ExploreConfig explore;
};

struct ScalarizationSettings {
  std::vector<double> lambdas = {0.0, 0.1, 0.3, 1.0, 3.0, 10.0};
  /// Gradient descent on (f1 + lambda f2) / (1 + lambda).
  MgdConfig inner{0.05, 500, 1e-10, false, false};
};

struct OutputSettings {
  std::string directory = "out";
  /// Write measured wall_ms_cum into points.csv. Off by default so reruns are byte-identical.
  bool point_timing = false;
};

struct ExperimentConfig {
  ProblemSpec problem;
  MethodKind method = MethodKind::kPc;
  SmgdSettings smgd;
  PcSettings pc;
  ScalarizationSettings scalarization;
  std::uint64_t seed = 0;
  /// Standard deviation of the Gaussian initial points.
  double init_scale = 0.01;
  OutputSettings output;

  /// SMGD, SCALARIZATION or PC-<GN|GN1|EXACT|FD>-<CG|MINRES|MINRES-LANCZOS>.
  std::string method_label() const;
  /// Throws ConfigError.
  void validate() const;
};

/// Parses YAML. Unknown keys, type errors and conflicting method blocks raise ConfigError.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Sets a method from a shorthand: smgd, scalarization, pc, pc-gn-cg, pc-gn-minres,
/// pc-hessian-cg, pc-hessian-minres (pc-exact-* is accepted as an alias).
void apply_method_shorthand(ExperimentConfig& config, const std::string& shorthand);

/// Every resolved field except the output directory.
nlohmann::json canonical_config(const ExperimentConfig& config);
/// FNV-1a of canonical_config().dump(), as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Seeded Gaussian start points, drawn in order from one stream.
std::vector<ParamVec> initial_points(std::size_t dimension, std::size_t count, std::uint64_t seed, double scale);

/// Output of one method. raw_points are in creation order; `reach_cost[i]` is the
/// gradient-evaluation count at which raw_points[i] is available when the
/// method is run in its natural schedule (SMGD advances all starts in lockstep).
struct MethodResult {
  ParetoArchive archive;
  ParetoArchive raw_points;
  std::vector<std::int64_t> reach_cost;
  RunRecord cost;
  std::vector<SolveRecord> solves;
  std::vector<std::string> log;
  bool complete = true;
  std::string error;
};

MethodResult run_smgd_baseline(const MooProblem& problem, int init_count, int epochs, const MgdConfig& config,
                               std::uint64_t seed, double init_scale = 0.01);
MethodResult run_scalarization_baseline(const MooProblem& problem, const std::vector<double>& lambdas,
                                        const MgdConfig& inner_config, std::uint64_t seed,
                                        double init_scale = 0.01);
/// Warm start with `warm_start_steps` descent steps of the configured kind, then explore.
MethodResult run_pc(const MooProblem& problem, const PcSettings& settings, std::uint64_t seed,
                    double init_scale = 0.01);
/// Dispatches on config.method. No file output.
MethodResult run_method(const ExperimentConfig& config, const MooProblem& problem);

struct ExperimentOutcome {
  MethodResult result;
  FrontMetrics metrics;
};

/// Runs the configured method and writes points.csv, archive.json, metrics.json,
/// run.log and (PC methods) residuals.csv into config.output.directory.
/// A numerical failure during the run still writes the files, then throws NumericalError.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// Writes every output file for one run into config.output.directory.
void write_run_files(const ExperimentConfig& config, const MethodResult& result, const FrontMetrics& metrics);
void write_points_csv(const ExperimentConfig& config, const MethodResult& result, std::ostream& out);
void write_residuals_csv(const ExperimentConfig& config, const MethodResult& result, std::ostream& out);
nlohmann::json metrics_to_json(const FrontMetrics& metrics);
nlohmann::json archive_to_json(const ExperimentConfig& config, const MethodResult& result);

struct ArchiveDocument {
  ParetoArchive points;
  std::vector<std::int64_t> archive_ids;
  RunRecord cost;
};
ArchiveDocument archive_from_json(const nlohmann::json& doc);

struct SummaryRow {
  std::string label;
  std::string config_hash;
  RunRecord cost;
  FrontMetrics metrics;
  /// Gradient evaluations until hypervolume first reaches the target; empty if never.
  std::optional<std::int64_t> evals_to_reach;
};

struct Comparison {
  std::vector<SummaryRow> rows;
  ObjectiveVec reference_point;
  double reach_target = 0.0;
  /// "analytic front" or "pooled best front".
  std::string reach_basis;
};

inline constexpr double kReachFraction = 0.95;

/// Runs every config (in parallel, capped by PARETO_TRACER_THREADS) and scores all
/// fronts against one reference point when `shared_reference` is set. With
/// `out_dir`, each run writes into out_dir/<index>-<label>/ and summary.csv goes to out_dir.
/// Throws ConfigError if the configs name different problems.
Comparison compare_methods(const std::vector<ExperimentConfig>& configs, bool shared_reference = true,
                           const std::optional<std::filesystem::path>& out_dir = std::nullopt);

void write_summary_csv(const Comparison& comparison, std::ostream& out);

/// First reach_cost at which the hypervolume of the points available so far is >= target.
std::optional<std::int64_t> evals_to_reach(const MethodResult& result, std::span<const double> reference,
                                           double target);

}  // namespace pareto_tracer
