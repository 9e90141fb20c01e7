#include "pareto_tracer/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <random>

#include <fmt/format.h>
#include <omp.h>

#include "pareto_tracer/kernels.hpp"
#include "pareto_tracer/problems.hpp"

namespace pareto_tracer {
namespace {

using clock_type = std::chrono::steady_clock;

std::int64_t elapsed_ms(clock_type::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(clock_type::now() - start).count();
}

QuadraticBiObjective make_quadratic(const ProblemSpec& spec) {
  return QuadraticBiObjective::symmetric(spec.dimension.value_or(50), spec.separation, spec.seed);
}

FairnessDataset load_dataset(const ProblemSpec& spec) {
  if (spec.dataset.empty())
    return generate_fairness_dataset(spec.seed, spec.samples, spec.features, spec.group_imbalance);
  std::ifstream in(spec.dataset);
  if (!in) throw ConfigError(fmt::format("cannot open dataset '{}'", spec.dataset));
  return read_fairness_csv(in);
}

int compare_threads(std::size_t runs) {
  if (const char* env = std::getenv("PARETO_TRACER_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || value < 1)
      throw ConfigError(fmt::format("PARETO_TRACER_THREADS must be a positive integer, got '{}'", env));
    return static_cast<int>(std::min<long>(value, static_cast<long>(std::max<std::size_t>(runs, 1))));
  }
  return static_cast<int>(std::max<std::size_t>(runs, 1));
}

// Non-dominated set maintained under insertion.
class IncrementalFront {
 public:
  void insert(const ObjectiveVec& p) {
    for (const ObjectiveVec& q : points_)
      if (q == p || dominates(q, p)) return;
    std::erase_if(points_, [&](const ObjectiveVec& q) { return dominates(p, q); });
    points_.push_back(p);
  }
  const std::vector<ObjectiveVec>& points() const { return points_; }

 private:
  std::vector<ObjectiveVec> points_;
};

// Gradient descent on (f1 + w f2) / (1 + w): same minimizers as f1 + w f2 with a
// step scale that does not grow with w. Stops on a small gradient or after max_iters.
struct Descent {
  ParamVec x;
  int iterations = 0;
};

Descent scalarized_descent(const MooProblem& problem, ParamVec x, double w, double step_size, int max_iters,
                           double tol) {
  const double w1 = 1.0 / (1.0 + w);
  const double w2 = w / (1.0 + w);
  Vector d(x.size());
  int it = 0;
  for (; it < max_iters; ++it) {
    const GradientSet g = problem.gradients(x);
    kernels::lincomb(w1, g.row(0), w2, g.row(1), d);
    if (kernels::norm2(d) <= tol) break;
    kernels::axpy(-step_size, d, x);
    if (!all_finite(x)) throw NumericalError(fmt::format("scalarized descent diverged at weight {}", w));
  }
  return {std::move(x), it};
}

}  // namespace

std::unique_ptr<MooProblem> make_problem(const ProblemSpec& spec) {
  try {
    if (spec.name == "quadratic") return std::make_unique<QuadraticBiObjective>(make_quadratic(spec));
    if (spec.name == "fonseca_fleming") return std::make_unique<FonsecaFleming>(spec.dimension.value_or(3));
    if (spec.name == "fairness") return std::make_unique<SyntheticFairness>(load_dataset(spec));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError(fmt::format("unknown problem '{}'", spec.name));
}

std::optional<std::vector<ObjectiveVec>> reference_front(const ProblemSpec& spec, int resolution) {
  if (spec.name == "quadratic") return analytic_front(make_quadratic(spec), resolution);
  if (spec.name == "fonseca_fleming") return analytic_front(FonsecaFleming(spec.dimension.value_or(3)), resolution);
  return std::nullopt;
}

std::vector<ParamVec> initial_points(std::size_t dimension, std::size_t count, std::uint64_t seed, double scale) {
  std::mt19937_64 rng = make_rng(seed, RngStream::kInitialPoints);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ParamVec> out(count, ParamVec(dimension));
  for (ParamVec& x : out)
    for (double& v : x) v = scale * normal(rng);
  return out;
}

MethodResult run_smgd_baseline(const MooProblem& problem, int init_count, int epochs, const MgdConfig& config,
                               std::uint64_t seed, double init_scale) {
  if (init_count < 1) throw ConfigError("smgd: init_count must be >= 1");
  if (epochs < 0) throw ConfigError("smgd: epochs must be >= 0");
  const auto start = clock_type::now();
  const CountingProblem counted(problem);
  MgdConfig mgd = config;
  mgd.max_iters = epochs;
  mgd.record_trace = true;
  mgd.record_iterates = true;

  MethodResult result;
  result.cost.method = "SMGD";
  result.cost.problem = problem.name();
  result.cost.seed = seed;

  // Per start: index of its first point and its gradient-evaluation count.
  std::vector<std::size_t> first_point;
  std::vector<std::int64_t> evals;
  std::int64_t next_id = 0;
  for (const ParamVec& x0 : initial_points(problem.dimension(), static_cast<std::size_t>(init_count), seed,
                                           init_scale)) {
    const std::int64_t before = counted.gradient_evaluations();
    first_point.push_back(result.raw_points.size());
    ParetoPoint root;
    root.x = x0;
    root.f = counted.evaluate(x0);
    root.point_id = next_id++;
    root.method_tag = MethodTag::kSmgd;
    root.grad_evals_cum = before;
    result.raw_points.push_back(root);

    std::vector<MgdTraceEntry> trace;
    try {
      MgdRunResult run = mgd_run(counted, x0, mgd);
      trace = std::move(run.trace);
    } catch (const DivergenceError& e) {
      trace = e.trace();
      result.complete = false;
      result.error = e.what();
    } catch (const NumericalError& e) {
      result.complete = false;
      result.error = e.what();
    }
    for (MgdTraceEntry& entry : trace) {
      if (entry.x.empty() || !all_finite(entry.f)) break;
      ParetoPoint p;
      p.x = std::move(entry.x);
      p.f = std::move(entry.f);
      p.point_id = next_id;
      p.parent_id = next_id - 1;
      p.method_tag = MethodTag::kSmgd;
      p.grad_evals_cum = before + entry.iteration;
      ++next_id;
      result.raw_points.push_back(std::move(p));
    }
    evals.push_back(counted.gradient_evaluations() - before);
    if (!result.complete) break;
  }

  // Lockstep schedule: after round k every start has spent min(k, its evals).
  result.reach_cost.resize(result.raw_points.size());
  for (std::size_t s = 0; s < first_point.size(); ++s) {
    const std::size_t end = s + 1 < first_point.size() ? first_point[s + 1] : result.raw_points.size();
    for (std::size_t i = first_point[s]; i < end; ++i) {
      const std::int64_t round = static_cast<std::int64_t>(i - first_point[s]);
      std::int64_t cost = 0;
      for (std::int64_t e : evals) cost += std::min(round, e);
      result.reach_cost[i] = cost;
    }
  }

  result.archive = pareto_filter(std::span<const ParetoPoint>(result.raw_points));
  result.cost.gradient_evals = counted.gradient_evaluations();
  result.cost.objective_evals = counted.objective_evaluations();
  result.cost.points_generated = static_cast<std::int64_t>(result.raw_points.size());
  result.cost.wall_time_ms = elapsed_ms(start);
  result.log.push_back(fmt::format("smgd: {} starts, {} epochs, step {}", init_count, epochs, config.step_size));
  if (!result.complete) result.log.push_back("error: " + result.error);
  return result;
}

MethodResult run_scalarization_baseline(const MooProblem& problem, const std::vector<double>& lambdas,
                                        const MgdConfig& inner_config, std::uint64_t seed, double init_scale) {
  if (problem.objective_count() != 2) throw ConfigError("scalarization: needs exactly two objectives");
  inner_config.validate();
  const auto start = clock_type::now();
  const CountingProblem counted(problem);
  const ParamVec x0 = initial_points(problem.dimension(), 1, seed, init_scale).front();

  MethodResult result;
  result.cost.method = "SCALARIZATION";
  result.cost.problem = problem.name();
  result.cost.seed = seed;
  std::int64_t next_id = 0;
  try {
    for (double lambda : lambdas) {
      if (!(lambda >= 0.0)) throw ConfigError("scalarization: lambda must be >= 0");
      auto [x, iterations] = scalarized_descent(counted, x0, lambda, inner_config.step_size,
                                                inner_config.max_iters, inner_config.stationarity_tol);
      ParetoPoint p;
      p.f = counted.evaluate(x);
      if (!all_finite(p.f)) throw NumericalError(fmt::format("scalarization diverged at lambda = {}", lambda));
      p.x = std::move(x);
      p.point_id = next_id++;
      p.method_tag = MethodTag::kScalarized;
      p.solver_iters = iterations;
      p.grad_evals_cum = counted.gradient_evaluations();
      result.reach_cost.push_back(p.grad_evals_cum);
      result.raw_points.push_back(std::move(p));
      result.log.push_back(fmt::format("lambda {}: {} iterations", lambda, iterations));
    }
  } catch (const NumericalError& e) {
    result.complete = false;
    result.error = e.what();
    result.log.push_back("error: " + result.error);
  }
  result.archive = pareto_filter(std::span<const ParetoPoint>(result.raw_points));
  result.cost.gradient_evals = counted.gradient_evaluations();
  result.cost.objective_evals = counted.objective_evaluations();
  result.cost.points_generated = static_cast<std::int64_t>(result.raw_points.size());
  result.cost.wall_time_ms = elapsed_ms(start);
  return result;
}

MethodResult run_pc(const MooProblem& problem, const PcSettings& settings, std::uint64_t seed, double init_scale) {
  const auto start = clock_type::now();
  const CountingProblem counted(problem);
  MethodResult result;

  ParamVec x0 = initial_points(problem.dimension(), 1, seed, init_scale).front();
  try {
    if (settings.warm_start == WarmStart::kMgd) {
      MgdConfig warm;
      warm.step_size = settings.warm_start_step;
      warm.max_iters = settings.warm_start_steps;
      warm.stationarity_tol = settings.explore.stationarity_tol;
      warm.record_trace = false;
      x0 = mgd_run(counted, std::move(x0), warm).x_final;
    } else {
      x0 = scalarized_descent(counted, std::move(x0), settings.warm_start_weight, settings.warm_start_step,
                              settings.warm_start_steps, settings.explore.stationarity_tol)
               .x;
    }
  } catch (const NumericalError& e) {
    result.complete = false;
    result.error = e.what();
    result.log.push_back("warm start failed: " + result.error);
    result.cost.problem = problem.name();
    result.cost.seed = seed;
    return result;
  }
  const double warm_norm = kernels::norm2(min_norm_weights(counted.gradients(x0)).direction);
  const std::int64_t warm_evals = counted.gradient_evaluations();
  result.log.push_back(fmt::format("warm start ({}): {} steps of size {}, {} gradient evaluations, |d| = {:.3e}",
                                   to_string(settings.warm_start), settings.warm_start_steps,
                                   settings.warm_start_step, warm_evals, warm_norm));

  ExploreConfig explore_config = settings.explore;
  explore_config.seed = seed;
  ExploreResult explored = explore(counted, x0, explore_config);

  result.raw_points = std::move(explored.raw_points);
  for (ParetoPoint& p : result.raw_points) {
    p.grad_evals_cum += warm_evals;
    result.reach_cost.push_back(p.grad_evals_cum);
  }
  result.archive = pareto_filter(std::span<const ParetoPoint>(result.raw_points));
  result.solves = std::move(explored.solves);
  result.cost = explored.cost;
  result.cost.gradient_evals = counted.gradient_evaluations();
  result.cost.objective_evals = counted.objective_evaluations();
  result.cost.wall_time_ms = elapsed_ms(start);
  result.complete = explored.complete;
  result.error = explored.error;

  result.log.push_back(fmt::format("explore: {} points, {} in archive, {} predictor fallbacks",
                                   result.raw_points.size(), result.archive.size(), result.cost.predictor_fallbacks));
  if (explored.nonstationary_parents > 0)
    result.log.push_back(fmt::format("warning: {} parents had |d| > {:.1e}", explored.nonstationary_parents,
                                     10.0 * settings.explore.stationarity_tol));
  if (!result.complete) result.log.push_back("error: " + result.error);
  return result;
}

MethodResult run_method(const ExperimentConfig& config, const MooProblem& problem) {
  config.validate();
  MethodResult result;
  switch (config.method) {
    case MethodKind::kSmgd:
      result = run_smgd_baseline(problem, config.smgd.init_count, config.smgd.epochs, config.smgd.mgd, config.seed,
                                 config.init_scale);
      break;
    case MethodKind::kScalarization:
      result = run_scalarization_baseline(problem, config.scalarization.lambdas, config.scalarization.inner,
                                          config.seed, config.init_scale);
      break;
    case MethodKind::kPc: result = run_pc(problem, config.pc, config.seed, config.init_scale); break;
  }
  result.cost.method = config.method_label();
  return result;
}

std::optional<std::int64_t> evals_to_reach(const MethodResult& result, std::span<const double> reference,
                                           double target) {
  if (result.reach_cost.size() != result.raw_points.size())
    throw std::invalid_argument("evals_to_reach: reach_cost does not match raw_points");
  std::vector<std::size_t> order(result.raw_points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return result.reach_cost[a] < result.reach_cost[b]; });
  IncrementalFront front;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const ParetoPoint& p = result.raw_points[order[k]];
    if (dominates(p.f, reference)) front.insert(p.f);
    const bool last_at_cost =
        k + 1 == order.size() || result.reach_cost[order[k + 1]] != result.reach_cost[order[k]];
    if (last_at_cost && hypervolume_2d(front.points(), reference) >= target) return result.reach_cost[order[k]];
  }
  return std::nullopt;
}

Comparison compare_methods(const std::vector<ExperimentConfig>& configs, bool shared_reference,
                           const std::optional<std::filesystem::path>& out_dir) {
  if (configs.empty()) throw ConfigError("compare: no configs");
  for (const ExperimentConfig& c : configs) {
    c.validate();
    if (!(c.problem == configs.front().problem))
      throw ConfigError(fmt::format("compare: configs name different problems ('{}' vs '{}')",
                                    configs.front().problem.name, c.problem.name));
  }
  const std::unique_ptr<MooProblem> problem = make_problem(configs.front().problem);
  const std::optional<std::vector<ObjectiveVec>> truth = reference_front(configs.front().problem);

  const auto count = static_cast<std::ptrdiff_t>(configs.size());
  std::vector<MethodResult> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  const int threads = compare_threads(configs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      results[i] = run_method(configs[i], *problem);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::vector<ObjectiveVec>> fronts;
  for (const MethodResult& r : results) fronts.push_back(objectives_of(r.archive));

  Comparison comparison;
  std::vector<std::span<const ObjectiveVec>> pool(fronts.begin(), fronts.end());
  if (truth) pool.emplace_back(*truth);
  if (shared_reference) comparison.reference_point = shared_reference_point(pool);

  if (truth) {
    comparison.reach_basis = "analytic front";
  } else {
    comparison.reach_basis = "pooled best front";
  }

  std::string first_error;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    SummaryRow row;
    row.label = configs[i].method_label();
    row.config_hash = config_hash(configs[i]);
    row.cost = results[i].cost;
    const ObjectiveVec reference =
        shared_reference ? comparison.reference_point
                         : shared_reference_point(truth ? std::vector<std::span<const ObjectiveVec>>{fronts[i], *truth}
                                                        : std::vector<std::span<const ObjectiveVec>>{fronts[i]});
    row.metrics = compute_front_metrics(fronts[i], reference,
                                        truth ? std::span<const ObjectiveVec>(*truth) : std::span<const ObjectiveVec>{});
    comparison.rows.push_back(std::move(row));
    if (!results[i].complete && first_error.empty()) first_error = results[i].error;
  }

  if (shared_reference) {
    double best = 0.0;
    if (truth) {
      best = hypervolume_2d(*truth, comparison.reference_point);
    } else {
      std::vector<ObjectiveVec> all;
      for (const auto& f : fronts) all.insert(all.end(), f.begin(), f.end());
      best = hypervolume_2d(pareto_filter(std::span<const ObjectiveVec>(all)), comparison.reference_point);
    }
    comparison.reach_target = kReachFraction * best;
    for (std::size_t i = 0; i < configs.size(); ++i)
      comparison.rows[i].evals_to_reach = evals_to_reach(results[i], comparison.reference_point, comparison.reach_target);
  }

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    for (std::size_t i = 0; i < configs.size(); ++i) {
      ExperimentConfig run_config = configs[i];
      run_config.output.directory = (*out_dir / fmt::format("{}-{}", i, configs[i].method_label())).string();
      write_run_files(run_config, results[i], comparison.rows[i].metrics);
    }
    std::ofstream summary(*out_dir / "summary.csv");
    write_summary_csv(comparison, summary);
  }
  if (!first_error.empty()) throw NumericalError("compare: a run failed: " + first_error);
  return comparison;
}

}  // namespace pareto_tracer
