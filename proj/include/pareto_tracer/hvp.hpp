#pragma once

// Linear operators for the predictor system H(x) v = J^T beta.
//
//   kExact      sum_i alpha_i H_i(x) v from the problem's analytic HVP
//   kFdExact    the same product from two gradient evaluations per apply
//   kGnRankOne  <J, v> J with J = sum_i alpha_i grad f_i
//   kGnSum      sum_i alpha_i <grad f_i, v> grad f_i
//
// Every mode adds mu * v. The Gauss-Newton operators capture a gradient
// snapshot and never call back into the problem.

#include <optional>
#include <span>
#include <string>

#include "pareto_tracer/krylov.hpp"
#include "pareto_tracer/problem.hpp"

namespace pareto_tracer {

enum class HvpMode { kExact, kFdExact, kGnRankOne, kGnSum };

std::string to_string(HvpMode mode);
HvpMode hvp_mode_from_string(const std::string& s);
bool is_gauss_newton(HvpMode mode);

struct HvpConfig {
  HvpMode mode = HvpMode::kGnSum;
  /// Damping mu. Unset means: default_damping() for Gauss-Newton modes, 0 otherwise.
  std::optional<double> damping;
};

/// Hessian combination weights alpha (on the simplex) and steering directions beta.
class PredictorWeights {
 public:
  /// Throws std::invalid_argument when alpha is off the simplex or beta is outside
  /// [-1, 1]^m or zero.
  PredictorWeights(Vector alpha, Vector beta);

  const Vector& alpha() const { return alpha_; }
  const Vector& beta() const { return beta_; }

 private:
  Vector alpha_;
  Vector beta_;
};

LinearOperator exact_hvp_operator(const MooProblem& problem, std::span<const double> x,
                                  std::span<const double> alpha, double mu = 0.0);

/// Central difference of g = sum_i alpha_i grad f_i along v with h = 1e-5 / max(1, |v|).
LinearOperator fd_hvp_operator(const MooProblem& problem, std::span<const double> x,
                               std::span<const double> alpha, double mu = 0.0);

LinearOperator gn_rank_one_operator(const GradientSet& grads, std::span<const double> alpha, double mu);
LinearOperator gn_sum_operator(const GradientSet& grads, std::span<const double> alpha, double mu);

/// sum_i beta_i grad f_i
Vector predictor_rhs(const GradientSet& grads, std::span<const double> beta);

/// mu = 1e-6 * (trace(GN) / n + 1) for the Gauss-Newton matrix of `mode`.
double default_damping(const GradientSet& grads, std::span<const double> alpha, HvpMode mode);

/// Builds the operator for `config`. `grads` must be the gradient set at x.
LinearOperator make_predictor_operator(const HvpConfig& config, const MooProblem& problem,
                                       std::span<const double> x, const GradientSet& grads,
                                       std::span<const double> alpha);

}  // namespace pareto_tracer
