#include "pareto_tracer/continuation.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <random>

#include <fmt/format.h>

#include "pareto_tracer/kernels.hpp"
#include "pareto_tracer/metrics.hpp"
#include "pareto_tracer/mgd.hpp"

namespace pareto_tracer {

PredictorResult predictor(const MooProblem& problem, std::span<const double> x, const PredictorWeights& weights,
                          const HvpConfig& hvp, SolverKind solver, const SolverConfig& config) {
  return predictor(problem, x, problem.gradients(x), weights, hvp, solver, config);
}

PredictorResult predictor(const MooProblem& problem, std::span<const double> x, const GradientSet& grads,
                          const PredictorWeights& weights, const HvpConfig& hvp, SolverKind solver,
                          const SolverConfig& config) {
  if (weights.alpha().size() != grads.objective_count())
    throw std::invalid_argument("predictor: weight length does not match objective count");
  const LinearOperator op = make_predictor_operator(hvp, problem, x, grads, weights.alpha());
  const Vector rhs = predictor_rhs(grads, weights.beta());
  SolveResult result = solve(solver, op, rhs, config);
  return {std::move(result.solution), std::move(result.report)};
}

ParamVec corrector(const MooProblem& problem, std::span<const double> x, int steps, double step_size) {
  if (steps < 0) throw std::invalid_argument("corrector: steps must be >= 0");
  ParamVec out(x.begin(), x.end());
  for (int s = 0; s < steps; ++s) out = mgd_step(problem, out, step_size).x_next;
  return out;
}

void ExploreConfig::validate(std::size_t objective_count) const {
  if (N < 1) throw ConfigError("explore: N must be >= 1");
  if (K < 1) throw ConfigError("explore: K must be >= 1");
  if (!(predictor_step > 0.0)) throw ConfigError("explore: predictor_step must be > 0");
  if (corrector_steps < 0) throw ConfigError("explore: corrector_steps must be >= 0");
  if (corrector_steps > 0 && !(corrector_step_size > 0.0))
    throw ConfigError("explore: corrector_step_size must be > 0");
  if (!(stationarity_tol > 0.0)) throw ConfigError("explore: stationarity_tol must be > 0");
  if (hvp.damping && *hvp.damping < 0.0) throw ConfigError("explore: damping must be >= 0");
  try {
    solver_config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::vector<Vector> betas = resolved_betas(objective_count);
  if (betas.empty()) throw ConfigError("explore: no beta directions");
  for (const Vector& beta : betas) {
    if (beta.size() != objective_count)
      throw ConfigError(fmt::format("explore: beta has {} entries, problem has {} objectives", beta.size(),
                                    objective_count));
    bool nonzero = false;
    for (double b : beta) {
      if (!(b >= -1.0 && b <= 1.0)) throw ConfigError("explore: beta entries must lie in [-1, 1]");
      nonzero = nonzero || b != 0.0;
    }
    if (!nonzero) throw ConfigError("explore: beta must be nonzero");
  }
}

std::vector<Vector> ExploreConfig::resolved_betas(std::size_t objective_count) const {
  if (!beta_directions.empty() || objective_count != 2) return beta_directions;
  return {{1.0, -1.0}, {-1.0, 1.0}};
}

ExploreResult explore(const MooProblem& problem, const ParamVec& x0, const ExploreConfig& config) {
  const std::size_t m = problem.objective_count();
  config.validate(m);
  if (x0.size() != problem.dimension()) throw std::invalid_argument("explore: x0 has the wrong dimension");

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed_ms = [&] { return std::chrono::duration<double, std::milli>(clock::now() - start).count(); };

  const CountingProblem counted(problem);
  std::mt19937_64 rng = make_rng(config.seed, RngStream::kBeta);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const MethodTag child_tag = config.corrector_steps > 0 ? MethodTag::kPcCorrected : MethodTag::kPcPredicted;

  ExploreResult result;
  RunRecord& cost = result.cost;
  cost.problem = problem.name();
  cost.seed = config.seed;

  ParetoPoint root;
  root.x = x0;
  root.f = counted.evaluate(x0);
  root.point_id = 0;
  root.method_tag = MethodTag::kSmgd;
  result.raw_points.push_back(root);

  std::int64_t next_id = 1;
  int solve_id = 0;
  auto finish = [&] {
    cost.gradient_evals = counted.gradient_evaluations();
    cost.objective_evals = counted.objective_evaluations();
    cost.points_generated = static_cast<std::int64_t>(result.raw_points.size()) - 1;
    cost.wall_time_ms = static_cast<std::int64_t>(elapsed_ms());
    result.archive = pareto_filter(std::span<const ParetoPoint>(result.raw_points));
  };

  try {
    for (const Vector& base_beta : config.resolved_betas(m)) {
      std::deque<std::size_t> queue{0};
      int count = 0;
      while (count < config.N) {
        const ParetoPoint parent = result.raw_points[queue.front()];
        queue.pop_front();

        // One Jacobian per parent, shared by all of its children.
        const GradientSet grads = counted.gradients(parent.x);
        const MinNormResult mn = min_norm_weights(grads);
        if (kernels::norm2(mn.direction) > 10.0 * config.stationarity_tol) ++result.nonstationary_parents;

        for (int child = 0; child < config.K && count < config.N; ++child) {
          Vector beta = base_beta;
          if (config.random_beta)
            for (double& b : beta) b *= 1.0 - unit(rng);
          const PredictorWeights weights(mn.weights.lambda, beta);

          SolveRecord record;
          record.solve_id = solve_id++;
          record.child_id = next_id;
          Vector v;
          const Vector rhs = predictor_rhs(grads, beta);
          const double rhs_norm = kernels::norm2(rhs);
          try {
            if (rhs_norm == 0.0) throw NumericalError("zero right-hand side");
            PredictorResult pr =
                predictor(counted, parent.x, grads, weights, config.hvp, config.solver, config.solver_config);
            v = std::move(pr.v);
            record.report = std::move(pr.report);
          } catch (const NumericalError& e) {
            if (const auto* breakdown = dynamic_cast<const SolverBreakdown*>(&e)) record.report = breakdown->report();
            record.fallback = true;
            ++cost.predictor_fallbacks;
            v = rhs;
            if (rhs_norm > 0.0) kernels::scale(1.0 / rhs_norm, v);
          }
          cost.hvp_applies += record.report.matvec_count;
          cost.solver_iterations_total += record.report.iterations_used;

          ParamVec x = parent.x;
          kernels::axpy(config.predictor_step, v, x);
          x = corrector(counted, x, config.corrector_steps, config.corrector_step_size);
          if (!all_finite(x)) throw NumericalError("explore: child parameters are not finite");

          ParetoPoint point;
          point.f = counted.evaluate(x);
          if (!all_finite(point.f)) throw NumericalError("explore: child objectives are not finite");
          point.x = std::move(x);
          point.point_id = next_id++;
          point.parent_id = parent.point_id;
          point.method_tag = child_tag;
          point.solver_iters = record.report.iterations_used;
          point.grad_evals_cum = counted.gradient_evaluations();
          point.wall_ms_cum = elapsed_ms();
          queue.push_back(result.raw_points.size());
          result.raw_points.push_back(std::move(point));
          result.solves.push_back(std::move(record));
          ++count;
        }
      }
    }
  } catch (const NumericalError& e) {
    result.complete = false;
    result.error = e.what();
  }
  finish();
  return result;
}

}  // namespace pareto_tracer
