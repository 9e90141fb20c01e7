#pragma once

// Matrix-free solvers for symmetric systems H v = b.
//
// All solvers start from v = 0, so the initial residual is b and no product
// is spent on it. Convergence is tested on the recursively updated residual
// norm; the iteration stops when that norm is <= tol or max_iter is reached.

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "pareto_tracer/types.hpp"

namespace pareto_tracer {

/// Symmetric linear map on R^n given only through its action.
class LinearOperator {
 public:
  using ApplyFn = std::function<void(std::span<const double> in, std::span<double> out)>;

  LinearOperator(std::size_t dim, ApplyFn apply) : dim_(dim), apply_(std::move(apply)) {}

  std::size_t dim() const { return dim_; }

  /// Writes H*in to out. Throws NumericalError if the result is not finite.
  void apply(std::span<const double> in, std::span<double> out) const;
  Vector operator()(std::span<const double> in) const;

  static LinearOperator from_dense(DenseMatrix matrix);

 private:
  std::size_t dim_;
  ApplyFn apply_;
};

struct SolverConfig {
  double tol = 1e-6;
  int max_iter = 50;
  bool record_residuals = true;

  void validate() const;
};

struct SolveReport {
  int iterations_used = 0;
  double final_residual_norm = 0.0;
  /// Residual norm after each iteration (iteration 1..iterations_used).
  std::optional<Vector> residual_history;
  bool converged = false;
  int matvec_count = 0;
};

struct SolveResult {
  Vector solution;
  SolveReport report;
};

/// Raised when a recurrence divides by zero. Carries the iterate reached so far.
class SolverBreakdown : public NumericalError {
 public:
  SolverBreakdown(const std::string& what, Vector partial, SolveReport report)
      : NumericalError(what), partial_(std::move(partial)), report_(std::move(report)) {}

  const Vector& partial_solution() const { return partial_; }
  const SolveReport& report() const { return report_; }

 private:
  Vector partial_;
  SolveReport report_;
};

enum class SolverKind {
  kCg,      ///< conjugate gradient
  kCr,      ///< conjugate residual; the harness label "MINRES" maps here
  kMinres,  ///< Lanczos MINRES with Givens rotations
};

std::string to_string(SolverKind kind);
/// Accepts cg, minres (conjugate residual), cr, lanczos / minres-lanczos.
SolverKind solver_kind_from_string(const std::string& s);

SolveResult cg_solve(const LinearOperator& op, std::span<const double> b, const SolverConfig& config);
SolveResult cr_solve(const LinearOperator& op, std::span<const double> b, const SolverConfig& config);
SolveResult minres_solve(const LinearOperator& op, std::span<const double> b,
                         const SolverConfig& config);
SolveResult solve(SolverKind kind, const LinearOperator& op, std::span<const double> b,
                  const SolverConfig& config);

/// Direct LU solve of a dense symmetric system; test oracle only (n <= 500).
/// Throws NumericalError for singular matrices.
Vector dense_solve_oracle(const DenseMatrix& matrix, std::span<const double> b);

}  // namespace pareto_tracer
