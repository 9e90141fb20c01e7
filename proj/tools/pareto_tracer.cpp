// Command-line front end: run, compare, validate, front.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pareto_tracer/harness.hpp"

namespace pt = pareto_tracer;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iter;
  std::optional<std::string> solver;
  std::optional<std::string> hvp_mode;
};

void add_override_flags(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--out", o.out, "Output directory");
  cmd.add_option("--seed", o.seed, "Run seed");
  cmd.add_option("--max-iter", o.max_iter, "Solver max_iter (pc) or iteration budget (smgd, scalarization)");
  cmd.add_option("--solver", o.solver, "cg, minres (conjugate residual) or minres-lanczos");
  cmd.add_option("--hvp-mode", o.hvp_mode, "exact, fd_exact, gn_rank_one or gn_sum");
}

pt::ExperimentConfig apply(pt::ExperimentConfig c, const Overrides& o) {
  if (o.out) c.output.directory = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.max_iter) {
    switch (c.method) {
      case pt::MethodKind::kPc: c.pc.explore.solver_config.max_iter = *o.max_iter; break;
      case pt::MethodKind::kSmgd: c.smgd.epochs = *o.max_iter; break;
      case pt::MethodKind::kScalarization: c.scalarization.inner.max_iters = *o.max_iter; break;
    }
  }
  if ((o.solver || o.hvp_mode) && c.method != pt::MethodKind::kPc)
    throw pt::ConfigError("--solver and --hvp-mode apply to predictor-corrector methods only");
  if (o.solver) c.pc.explore.solver = pt::solver_kind_from_string(*o.solver);
  if (o.hvp_mode) c.pc.explore.hvp.mode = pt::hvp_mode_from_string(*o.hvp_mode);
  c.validate();
  return c;
}

void print_metrics(const pt::FrontMetrics& m) {
  fmt::print("points {}  hypervolume {:.10g}  spread {:.6g}", m.point_count, m.hypervolume, m.spread);
  if (m.generational_distance) fmt::print("  generational_distance {:.6e}", *m.generational_distance);
  fmt::print("\n");
}

int cmd_run(const std::string& path, const Overrides& o) {
  const pt::ExperimentConfig config = apply(pt::load_config(path), o);
  const pt::ExperimentOutcome outcome = pt::run_experiment(config);
  fmt::print("{} on {}: {} gradient evaluations\n", config.method_label(), config.problem.name,
             outcome.result.cost.gradient_evals);
  print_metrics(outcome.metrics);
  fmt::print("wrote {}\n", config.output.directory);
  return 0;
}

int cmd_compare(const std::vector<std::string>& paths, const Overrides& o, bool no_shared) {
  std::vector<pt::ExperimentConfig> configs;
  Overrides per_run = o;
  per_run.out.reset();
  for (const std::string& p : paths) configs.push_back(apply(pt::load_config(p), per_run));
  const std::filesystem::path out = o.out.value_or("compare-out");
  const pt::Comparison comparison = pt::compare_methods(configs, !no_shared, out);
  pt::write_summary_csv(comparison, std::cout);
  return 0;
}

int cmd_validate(const std::string& path, int probes, std::uint64_t seed) {
  const pt::ExperimentConfig config = pt::load_config(path);
  const auto problem = pt::make_problem(config.problem);
  const pt::ValidationReport report = pt::validate_problem(*problem, probes, seed);
  fmt::print("problem {} (n = {}, m = {})\n", problem->name(), problem->dimension(), problem->objective_count());
  for (std::size_t i = 0; i < report.gradient_rel_error.size(); ++i)
    fmt::print("  gradient {}: max relative error {:.3e}\n", i + 1, report.gradient_rel_error[i]);
  if (report.hvp_rel_error) fmt::print("  hvp: max relative error {:.3e}\n", *report.hvp_rel_error);
  fmt::print("  pure: {}\n", report.pure ? "yes" : "no");
  for (const std::string& f : report.failures) fmt::print("  FAIL {}\n", f);
  fmt::print("{}\n", report.passed ? "passed" : "failed");
  return report.passed ? 0 : kExitNumerical;
}

int cmd_front(const std::string& path, int resolution, const std::optional<std::string>& out_path) {
  const pt::ExperimentConfig config = pt::load_config(path);
  const auto front = pt::reference_front(config.problem, resolution);
  if (!front) throw pt::ConfigError(fmt::format("problem '{}' has no known front", config.problem.name));
  std::ofstream file;
  if (out_path) {
    file.open(*out_path);
    if (!file) throw pt::Error(fmt::format("cannot write '{}'", *out_path));
  }
  std::ostream& out = out_path ? file : std::cout;
  out << "# config_hash=" << pt::config_hash(config) << "\nf_1,f_2\n";
  for (const pt::ObjectiveVec& f : *front) out << fmt::format("{:.17g},{:.17g}\n", f[0], f[1]);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pareto front tracing by predictor-corrector continuation"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one experiment and write its output files");
  run->add_option("--config", config_path, "YAML config")->required()->check(CLI::ExistingFile);
  add_override_flags(*run, overrides);

  std::vector<std::string> compare_paths;
  bool no_shared = false;
  auto* compare = app.add_subcommand("compare", "Run several configs on one problem and summarize");
  compare->add_option("--config", compare_paths, "YAML configs (repeat)")->required()->check(CLI::ExistingFile);
  compare->add_flag("--no-shared-reference", no_shared, "Score each front against its own reference point");
  add_override_flags(*compare, overrides);

  int probes = 20;
  std::uint64_t validate_seed = 0;
  auto* validate = app.add_subcommand("validate", "Check a problem's gradients and HVPs against finite differences");
  validate->add_option("--config", config_path, "YAML config")->required()->check(CLI::ExistingFile);
  validate->add_option("--probes", probes, "Number of probe points")->check(CLI::PositiveNumber);
  validate->add_option("--seed", validate_seed, "Probe seed");

  int resolution = 1000;
  std::optional<std::string> front_out;
  auto* front = app.add_subcommand("front", "Emit the known Pareto front of the configured problem as CSV");
  front->add_option("--config", config_path, "YAML config")->required()->check(CLI::ExistingFile);
  front->add_option("--resolution", resolution, "Number of segments")->check(CLI::PositiveNumber);
  front->add_option("--out", front_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, overrides);
    if (*compare) return cmd_compare(compare_paths, overrides, no_shared);
    if (*validate) return cmd_validate(config_path, probes, validate_seed);
    if (*front) return cmd_front(config_path, resolution, front_out);
  } catch (const pt::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const pt::NumericalError& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
