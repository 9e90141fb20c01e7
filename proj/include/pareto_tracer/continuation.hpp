#pragma once

// Predictor-corrector exploration of a Pareto front.
//
// Starting from a Pareto-stationary x0, each parent popped from a FIFO queue
// spawns K children: solve H v = J^T beta at the parent, step to parent +
// alpha * v, then run a few multi-gradient descent steps back towards the
// front. The traversal is repeated for every steering direction beta, and the
// pooled points are dominance-filtered at the end.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pareto_tracer/hvp.hpp"
#include "pareto_tracer/krylov.hpp"
#include "pareto_tracer/problem.hpp"

namespace pareto_tracer {

struct PredictorResult {
  Vector v;
  SolveReport report;
};

/// Solves H(x) v = sum_i beta_i grad f_i with the operator selected by `hvp`.
/// Throws SolverBreakdown (carrying the partial v) when the recurrence breaks down.
PredictorResult predictor(const MooProblem& problem, std::span<const double> x, const PredictorWeights& weights,
                          const HvpConfig& hvp, SolverKind solver, const SolverConfig& config);
/// Same, reusing gradients already evaluated at x.
PredictorResult predictor(const MooProblem& problem, std::span<const double> x, const GradientSet& grads,
                          const PredictorWeights& weights, const HvpConfig& hvp, SolverKind solver,
                          const SolverConfig& config);

/// `steps` multi-gradient descent steps. steps = 0 returns x unchanged.
ParamVec corrector(const MooProblem& problem, std::span<const double> x, int steps, double step_size);

struct ExploreConfig {
  /// Children generated per steering direction.
  int N = 100;
  /// Children per parent.
  int K = 1;
  double predictor_step = 0.1;
  int corrector_steps = 5;
  double corrector_step_size = 0.01;
  /// Empty means (1, -1) and (-1, 1) for two objectives.
  std::vector<Vector> beta_directions;
  /// Scale each child's beta componentwise by U(0, 1] draws, keeping its signs.
  bool random_beta = false;
  SolverKind solver = SolverKind::kCr;
  HvpConfig hvp;
  SolverConfig solver_config;
  std::uint64_t seed = 0;
  /// Parents whose min-norm direction exceeds 10x this are counted as non-stationary.
  double stationarity_tol = 1e-8;

  /// Throws ConfigError. Fills nothing in; see resolved_betas().
  void validate(std::size_t objective_count) const;
  std::vector<Vector> resolved_betas(std::size_t objective_count) const;
};

struct SolveRecord {
  int solve_id = 0;
  std::int64_t child_id = 0;
  SolveReport report;
  bool fallback = false;
};

struct ExploreResult {
  /// Dominance-filtered subset of raw_points.
  ParetoArchive archive;
  /// Every generated point in creation order, root first.
  ParetoArchive raw_points;
  RunRecord cost;
  std::vector<SolveRecord> solves;
  int nonstationary_parents = 0;
  /// False when a numerical error stopped the traversal early; `error` holds the message.
  bool complete = true;
  std::string error;
};

ExploreResult explore(const MooProblem& problem, const ParamVec& x0, const ExploreConfig& config);

}  // namespace pareto_tracer
