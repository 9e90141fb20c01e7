#include "pareto_tracer/hvp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "pareto_tracer/kernels.hpp"

namespace pareto_tracer {

std::string to_string(HvpMode mode) {
  switch (mode) {
    case HvpMode::kExact: return "exact";
    case HvpMode::kFdExact: return "fd_exact";
    case HvpMode::kGnRankOne: return "gn_rank_one";
    case HvpMode::kGnSum: return "gn_sum";
  }
  return "?";
}

HvpMode hvp_mode_from_string(const std::string& raw) {
  std::string s = raw;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::tolower(c));
  });
  if (s == "exact" || s == "hessian") return HvpMode::kExact;
  if (s == "fd_exact" || s == "fd") return HvpMode::kFdExact;
  if (s == "gn_rank_one" || s == "gn_rank1") return HvpMode::kGnRankOne;
  if (s == "gn_sum" || s == "gn") return HvpMode::kGnSum;
  throw ConfigError("unknown hvp mode '" + raw + "' (expected exact, fd_exact, gn_rank_one, gn_sum)");
}

bool is_gauss_newton(HvpMode mode) { return mode == HvpMode::kGnRankOne || mode == HvpMode::kGnSum; }

PredictorWeights::PredictorWeights(Vector alpha, Vector beta)
    : alpha_(std::move(alpha)), beta_(std::move(beta)) {
  if (alpha_.size() != beta_.size()) throw std::invalid_argument("PredictorWeights: alpha/beta length mismatch");
  double sum = 0.0;
  for (double a : alpha_) {
    if (!(a >= 0.0)) throw std::invalid_argument("PredictorWeights: alpha entries must be >= 0");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("PredictorWeights: alpha must sum to 1");
  bool nonzero = false;
  for (double b : beta_) {
    if (!(b >= -1.0 && b <= 1.0)) throw std::invalid_argument("PredictorWeights: beta entries must lie in [-1, 1]");
    nonzero = nonzero || b != 0.0;
  }
  if (!nonzero) throw std::invalid_argument("PredictorWeights: beta must be nonzero");
}

namespace {

void check_weights(const GradientSet& grads, std::span<const double> w) {
  if (w.size() != grads.objective_count())
    throw std::invalid_argument("weight vector length must equal the objective count");
}

Vector weighted_gradient(const GradientSet& grads, std::span<const double> alpha) {
  Vector j(grads.dimension(), 0.0);
  for (std::size_t i = 0; i < grads.objective_count(); ++i) kernels::axpy(alpha[i], grads.row(i), j);
  return j;
}

}  // namespace

LinearOperator exact_hvp_operator(const MooProblem& problem, std::span<const double> x,
                                  std::span<const double> alpha, double mu) {
  if (!problem.has_exact_hvp()) throw Error(problem.name() + " has no exact Hessian-vector product");
  if (alpha.size() != problem.objective_count()) throw std::invalid_argument("alpha length mismatch");
  const std::size_t n = problem.dimension();
  return LinearOperator(n, [&problem, xs = ParamVec(x.begin(), x.end()), a = Vector(alpha.begin(), alpha.end()),
                            mu](std::span<const double> v, std::span<double> out) {
    const Vector hv = problem.exact_hvp(xs, a, v);
    std::copy(hv.begin(), hv.end(), out.begin());
    if (mu != 0.0) kernels::axpy(mu, v, out);
  });
}

LinearOperator fd_hvp_operator(const MooProblem& problem, std::span<const double> x,
                               std::span<const double> alpha, double mu) {
  if (alpha.size() != problem.objective_count()) throw std::invalid_argument("alpha length mismatch");
  const std::size_t n = problem.dimension();
  return LinearOperator(n, [&problem, xs = ParamVec(x.begin(), x.end()), a = Vector(alpha.begin(), alpha.end()),
                            mu](std::span<const double> v, std::span<double> out) {
    const double h = 1e-5 / std::max(1.0, kernels::norm2(v));
    ParamVec plus = xs, minus = xs;
    kernels::axpy(h, v, plus);
    kernels::axpy(-h, v, minus);
    const Vector gp = weighted_gradient(problem.gradients(plus), a);
    const Vector gm = weighted_gradient(problem.gradients(minus), a);
    kernels::lincomb(0.5 / h, gp, -0.5 / h, gm, out);
    if (mu != 0.0) kernels::axpy(mu, v, out);
  });
}

LinearOperator gn_rank_one_operator(const GradientSet& grads, std::span<const double> alpha, double mu) {
  check_weights(grads, alpha);
  auto j = std::make_shared<const Vector>(weighted_gradient(grads, alpha));
  return LinearOperator(grads.dimension(), [j, mu](std::span<const double> v, std::span<double> out) {
    const double d = kernels::dot(*j, v);
    kernels::lincomb(d, *j, mu, v, out);
  });
}

LinearOperator gn_sum_operator(const GradientSet& grads, std::span<const double> alpha, double mu) {
  check_weights(grads, alpha);
  auto snapshot = std::make_shared<const GradientSet>(grads);
  auto weights = std::make_shared<const Vector>(alpha.begin(), alpha.end());
  return LinearOperator(grads.dimension(), [snapshot, weights, mu](std::span<const double> v,
                                                                    std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < snapshot->objective_count(); ++i) {
      const auto g = snapshot->row(i);
      kernels::axpy((*weights)[i] * kernels::dot(g, v), g, out);
    }
    if (mu != 0.0) kernels::axpy(mu, v, out);
  });
}

Vector predictor_rhs(const GradientSet& grads, std::span<const double> beta) {
  check_weights(grads, beta);
  return weighted_gradient(grads, beta);
}

double default_damping(const GradientSet& grads, std::span<const double> alpha, HvpMode mode) {
  check_weights(grads, alpha);
  const double n = static_cast<double>(std::max<std::size_t>(grads.dimension(), 1));
  double trace = 0.0;
  if (mode == HvpMode::kGnRankOne) {
    const Vector j = weighted_gradient(grads, alpha);
    trace = kernels::dot(j, j);
  } else {
    for (std::size_t i = 0; i < grads.objective_count(); ++i)
      trace += alpha[i] * kernels::dot(grads.row(i), grads.row(i));
  }
  return 1e-6 * (trace / n + 1.0);
}

LinearOperator make_predictor_operator(const HvpConfig& config, const MooProblem& problem,
                                       std::span<const double> x, const GradientSet& grads,
                                       std::span<const double> alpha) {
  double mu = 0.0;
  if (config.damping) {
    if (*config.damping < 0.0) throw ConfigError("damping must be >= 0");
    mu = *config.damping;
  } else if (is_gauss_newton(config.mode)) {
    mu = default_damping(grads, alpha, config.mode);
  }
  switch (config.mode) {
    case HvpMode::kExact:
      return problem.has_exact_hvp() ? exact_hvp_operator(problem, x, alpha, mu)
                                     : fd_hvp_operator(problem, x, alpha, mu);
    case HvpMode::kFdExact: return fd_hvp_operator(problem, x, alpha, mu);
    case HvpMode::kGnRankOne: return gn_rank_one_operator(grads, alpha, mu);
    case HvpMode::kGnSum: return gn_sum_operator(grads, alpha, mu);
  }
  throw std::invalid_argument("unknown hvp mode");
}

}  // namespace pareto_tracer
