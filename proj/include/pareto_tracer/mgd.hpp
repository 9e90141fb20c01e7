#pragma once

#include <span>
#include <vector>

#include "pareto_tracer/problem.hpp"

namespace pareto_tracer {

/// Convex combination weights: lambda_i >= 0, sum lambda_i = 1.
struct SimplexWeights {
  Vector lambda;
};

struct MinNormResult {
  SimplexWeights weights;
  /// d = sum_i lambda_i grad f_i, the minimum-norm point of the gradients' convex hull.
  Vector direction;
};

/// Minimum-norm element of the convex hull of the gradient rows.
///
/// m = 2 uses the closed form; m > 2 runs projected gradient on the simplex
/// with step 1/L and then solves the equality-constrained problem on the
/// detected support. Identical or all-zero gradients give uniform weights.
MinNormResult min_norm_weights(const GradientSet& grads);

/// Euclidean projection onto the probability simplex.
Vector project_to_simplex(std::span<const double> v);

struct MgdConfig {
  double step_size = 0.005;
  int max_iters = 75;
  /// Stop once |d| falls to this value.
  double stationarity_tol = 1e-8;
  bool record_trace = true;
  /// Also keep x in every trace entry.
  bool record_iterates = false;

  void validate() const;
};

struct MgdStepResult {
  ParamVec x_next;
  double direction_norm = 0.0;
};

/// x_next = x - step_size * d.
MgdStepResult mgd_step(const MooProblem& problem, std::span<const double> x, double step_size);

struct MgdTraceEntry {
  int iteration = 0;
  ObjectiveVec f;
  double direction_norm = 0.0;
  /// Empty unless MgdConfig::record_iterates.
  ParamVec x;
};

struct MgdRunResult {
  ParamVec x_final;
  int iterations = 0;
  bool converged = false;
  std::vector<MgdTraceEntry> trace;
};

/// Raised when an objective exceeds 1e12; carries the trace so far.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, std::vector<MgdTraceEntry> trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const std::vector<MgdTraceEntry>& trace() const { return trace_; }

 private:
  std::vector<MgdTraceEntry> trace_;
};

/// Repeats mgd_step until |d| <= stationarity_tol or max_iters steps were taken.
MgdRunResult mgd_run(const MooProblem& problem, ParamVec x0, const MgdConfig& config);

}  // namespace pareto_tracer
