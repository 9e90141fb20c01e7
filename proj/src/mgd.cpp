#include "pareto_tracer/mgd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>

#include "pareto_tracer/kernels.hpp"

namespace pareto_tracer {
namespace {

constexpr int kProjectedGradientMaxIter = 1000;
constexpr double kProjectedGradientMinDecrease = 1e-12;
constexpr double kDivergenceThreshold = 1e12;
constexpr std::size_t kExhaustiveFaceLimit = 12;

using Gram = std::vector<Vector>;

Gram gram_matrix(const GradientSet& grads) {
  const std::size_t m = grads.objective_count();
  Gram g(m, Vector(m, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) g[i][j] = g[j][i] = kernels::dot(grads.row(i), grads.row(j));
  return g;
}

Vector gram_times(const Gram& g, std::span<const double> lambda) {
  Vector out(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) out[i] += g[i][j] * lambda[j];
  return out;
}

double quad_form(const Gram& g, std::span<const double> lambda) {
  const Vector gl = gram_times(g, lambda);
  return std::inner_product(lambda.begin(), lambda.end(), gl.begin(), 0.0);
}

// max_i (q - (G lambda)_i); zero at a minimizer over the simplex.
double kkt_violation(const Gram& g, std::span<const double> lambda) {
  const Vector gl = gram_times(g, lambda);
  const double q = std::inner_product(lambda.begin(), lambda.end(), gl.begin(), 0.0);
  double worst = 0.0;
  for (double v : gl) worst = std::max(worst, q - v);
  return worst;
}

// Solves [G_SS 1; 1' 0] [lambda; -nu] = [0; 1] by Gaussian elimination.
std::optional<Vector> solve_on_support(const Gram& g, const std::vector<std::size_t>& support) {
  const std::size_t k = support.size();
  const std::size_t dim = k + 1;
  std::vector<Vector> a(dim, Vector(dim + 1, 0.0));
  double scale = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      a[r][c] = g[support[r]][support[c]];
      scale = std::max(scale, std::abs(a[r][c]));
    }
    a[r][k] = 1.0;
    a[k][r] = 1.0;
  }
  a[k][dim] = 1.0;

  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < dim; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) <= 1e-13 * std::max(scale, 1.0)) return std::nullopt;
    std::swap(a[pivot], a[col]);
    for (std::size_t r = 0; r < dim; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= dim; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  Vector lambda(g.size(), 0.0);
  for (std::size_t r = 0; r < k; ++r) lambda[support[r]] = a[r][dim] / a[r][r];
  return lambda;
}

// Active-set polish started from the support found by projected gradient.
std::optional<Vector> refine_on_support(const Gram& g, std::span<const double> start) {
  const std::size_t m = g.size();
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < m; ++i)
    if (start[i] > 1e-12) support.push_back(i);

  for (std::size_t round = 0; round < 2 * m && !support.empty(); ++round) {
    auto candidate = solve_on_support(g, support);
    if (!candidate) return std::nullopt;
    Vector& lambda = *candidate;

    auto most_negative = std::min_element(support.begin(), support.end(),
                                          [&](std::size_t a, std::size_t b) { return lambda[a] < lambda[b]; });
    if (lambda[*most_negative] < 0.0) {
      support.erase(most_negative);
      continue;
    }
    const Vector gl = gram_times(g, lambda);
    const double q = std::inner_product(lambda.begin(), lambda.end(), gl.begin(), 0.0);
    std::size_t entering = m;
    double worst = 1e-15 * std::max(1.0, std::abs(q));
    for (std::size_t i = 0; i < m; ++i) {
      if (std::find(support.begin(), support.end(), i) != support.end()) continue;
      if (q - gl[i] > worst) {
        worst = q - gl[i];
        entering = i;
      }
    }
    if (entering == m) return lambda;
    support.push_back(entering);
    std::sort(support.begin(), support.end());
  }
  return std::nullopt;
}

Vector projected_gradient(const Gram& g) {
  const std::size_t m = g.size();
  double lipschitz = 0.0;
  for (const Vector& row : g) {
    double s = 0.0;
    for (double v : row) s += std::abs(v);
    lipschitz = std::max(lipschitz, s);
  }
  Vector lambda(m, 1.0 / static_cast<double>(m));
  if (lipschitz == 0.0) return lambda;

  double q = quad_form(g, lambda);
  Vector trial(m);
  for (int it = 0; it < kProjectedGradientMaxIter; ++it) {
    const Vector grad = gram_times(g, lambda);
    for (std::size_t i = 0; i < m; ++i) trial[i] = lambda[i] - grad[i] / lipschitz;
    Vector next = project_to_simplex(trial);
    const double q_next = quad_form(g, next);
    const double decrease = q - q_next;
    if (q_next <= q) {
      lambda = std::move(next);
      q = q_next;
    }
    if (decrease < kProjectedGradientMinDecrease) break;
  }
  return lambda;
}

// Exact minimizer for small m: the optimum lies in the relative interior of some
// face spanned by affinely independent gradients, so try every face.
Vector best_face(const Gram& g) {
  const std::size_t m = g.size();
  double trace = 0.0;
  for (std::size_t i = 0; i < m; ++i) trace += g[i][i];
  if (trace == 0.0) return Vector(m, 1.0 / static_cast<double>(m));
  Vector best;
  double best_q = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> support;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    support.clear();
    for (std::size_t i = 0; i < m; ++i)
      if (mask & (1u << i)) support.push_back(i);
    const auto lambda = solve_on_support(g, support);
    if (!lambda || *std::min_element(lambda->begin(), lambda->end()) < 0.0) continue;
    const double q = quad_form(g, *lambda);
    if (q < best_q) {
      best_q = q;
      best = *lambda;
    }
  }
  return best;
}

Vector combine(const GradientSet& grads, std::span<const double> lambda) {
  Vector d(grads.dimension(), 0.0);
  for (std::size_t i = 0; i < grads.objective_count(); ++i) kernels::axpy(lambda[i], grads.row(i), d);
  return d;
}

}  // namespace

Vector project_to_simplex(std::span<const double> v) {
  Vector sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) theta = t;
  }
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

MinNormResult min_norm_weights(const GradientSet& grads) {
  const std::size_t m = grads.objective_count();
  if (m == 0) throw std::invalid_argument("min_norm_weights: no gradients");
  if (!grads.all_finite()) throw NumericalError("min_norm_weights: non-finite gradient");

  Vector lambda;
  if (m == 1) {
    lambda = {1.0};
  } else if (m == 2) {
    const auto g1 = grads.row(0);
    const auto g2 = grads.row(1);
    Vector diff(grads.dimension());
    kernels::lincomb(1.0, g1, -1.0, g2, diff);
    const double denom = kernels::dot(diff, diff);
    if (denom == 0.0) {
      lambda = {0.5, 0.5};
    } else {
      // <g2 - g1, g2> / |g1 - g2|^2
      const double l1 = std::clamp(-kernels::dot(diff, g2) / denom, 0.0, 1.0);
      lambda = {l1, 1.0 - l1};
    }
  } else {
    const Gram g = gram_matrix(grads);
    if (m <= kExhaustiveFaceLimit) {
      lambda = best_face(g);
    } else {
      lambda = projected_gradient(g);
      if (auto refined = refine_on_support(g, lambda)) {
        Vector candidate = project_to_simplex(*refined);
        if (kkt_violation(g, candidate) < kkt_violation(g, lambda)) lambda = std::move(candidate);
      }
    }
  }
  Vector d = combine(grads, lambda);
  return {SimplexWeights{std::move(lambda)}, std::move(d)};
}

void MgdConfig::validate() const {
  if (!(step_size > 0.0)) throw ConfigError("MGD step_size must be > 0");
  if (max_iters < 0) throw ConfigError("MGD max_iters must be >= 0");
  if (!(stationarity_tol > 0.0)) throw ConfigError("MGD stationarity_tol must be > 0");
}

MgdStepResult mgd_step(const MooProblem& problem, std::span<const double> x, double step_size) {
  if (!(step_size > 0.0)) throw std::invalid_argument("mgd_step: step_size must be > 0");
  const MinNormResult mn = min_norm_weights(problem.gradients(x));
  ParamVec next(x.begin(), x.end());
  kernels::axpy(-step_size, mn.direction, next);
  return {std::move(next), kernels::norm2(mn.direction)};
}

MgdRunResult mgd_run(const MooProblem& problem, ParamVec x0, const MgdConfig& config) {
  config.validate();
  MgdRunResult result;
  result.x_final = std::move(x0);
  for (int it = 0; it < config.max_iters; ++it) {
    const MinNormResult mn = min_norm_weights(problem.gradients(result.x_final));
    const double norm = kernels::norm2(mn.direction);
    if (norm <= config.stationarity_tol) {
      result.converged = true;
      return result;
    }
    kernels::axpy(-config.step_size, mn.direction, result.x_final);
    ++result.iterations;

    ObjectiveVec f = problem.evaluate(result.x_final);
    const bool diverged = std::any_of(f.begin(), f.end(), [](double v) {
      return !std::isfinite(v) || v > kDivergenceThreshold;
    });
    if (config.record_trace || diverged) {
      result.trace.push_back({result.iterations, std::move(f), norm, {}});
      if (config.record_iterates) result.trace.back().x = result.x_final;
    }
    if (diverged) throw DivergenceError("multi-gradient descent diverged", std::move(result.trace));
  }
  return result;
}

}  // namespace pareto_tracer
