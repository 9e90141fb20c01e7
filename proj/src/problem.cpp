#include "pareto_tracer/problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "pareto_tracer/kernels.hpp"

namespace pareto_tracer {

Vector MooProblem::exact_hvp(std::span<const double>, std::span<const double>,
                             std::span<const double>) const {
  throw Error(name() + ": exact Hessian-vector products are not available");
}

ObjectiveVec CountingProblem::evaluate(std::span<const double> x) const {
  evaluations_.fetch_add(1, std::memory_order_relaxed);
  return inner_.evaluate(x);
}

GradientSet CountingProblem::gradients(std::span<const double> x) const {
  gradient_calls_.fetch_add(1, std::memory_order_relaxed);
  return inner_.gradients(x);
}

Vector CountingProblem::exact_hvp(std::span<const double> x, std::span<const double> weights,
                                  std::span<const double> v) const {
  hvp_calls_.fetch_add(1, std::memory_order_relaxed);
  return inner_.exact_hvp(x, weights, v);
}

GradientSet finite_difference_gradients(const MooProblem& problem, std::span<const double> x) {
  const std::size_t n = problem.dimension();
  const std::size_t m = problem.objective_count();
  GradientSet out(m, n);
  ParamVec probe(x.begin(), x.end());
  auto at = [&](std::size_t j, double offset) {
    probe[j] = x[j] + offset;
    ObjectiveVec f = problem.evaluate(probe);
    probe[j] = x[j];
    return f;
  };
  for (std::size_t j = 0; j < n; ++j) {
    const double h = 1e-3 * (1.0 + std::abs(x[j]));
    const ObjectiveVec p1 = at(j, h), m1 = at(j, -h), p2 = at(j, 2.0 * h), m2 = at(j, -2.0 * h);
    for (std::size_t i = 0; i < m; ++i)
      out.row(i)[j] = (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * h);
  }
  return out;
}

namespace {

double relative_error(std::span<const double> value, std::span<const double> reference) {
  Vector diff(value.size());
  kernels::lincomb(1.0, value, -1.0, reference, diff);
  const double scale = std::max({kernels::norm2(value), kernels::norm2(reference), 1e-8});
  return kernels::norm2(diff) / scale;
}

std::string describe_point(std::span<const double> x) {
  std::string s = "[";
  for (std::size_t j = 0; j < x.size(); ++j) s += fmt::format("{}{:.6g}", j ? ", " : "", x[j]);
  return s + "]";
}

}  // namespace

ValidationReport validate_problem(const MooProblem& problem, int probe_count, std::uint64_t seed,
                                  const ValidationOptions& options) {
  if (probe_count < 1) throw std::invalid_argument("validate_problem: probe_count must be >= 1");

  const std::size_t n = problem.dimension();
  const std::size_t m = problem.objective_count();
  ValidationReport report;
  report.gradient_rel_error.assign(m, 0.0);
  if (problem.has_exact_hvp()) report.hvp_rel_error = 0.0;

  std::mt19937_64 rng = make_rng(seed, RngStream::kProbes);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  for (int probe = 0; probe < probe_count; ++probe) {
    ParamVec x(n);
    for (double& v : x) v = options.probe_scale * normal(rng);

    const ObjectiveVec f = problem.evaluate(x);
    const GradientSet g = problem.gradients(x);
    if (f.size() != m || g.objective_count() != m || g.dimension() != n) {
      report.passed = false;
      report.failures.push_back("dimension mismatch at " + describe_point(x));
      continue;
    }
    if (!all_finite(f) || !g.all_finite()) {
      report.passed = false;
      report.failures.push_back("non-finite objective or gradient at " + describe_point(x));
      continue;
    }
    if (problem.evaluate(x) != f || problem.gradients(x) != g) {
      report.pure = false;
      report.passed = false;
      report.failures.push_back("repeated evaluation differs at " + describe_point(x));
    }

    const GradientSet fd = finite_difference_gradients(problem, x);
    for (std::size_t i = 0; i < m; ++i) {
      const double err = relative_error(g.row(i), fd.row(i));
      report.gradient_rel_error[i] = std::max(report.gradient_rel_error[i], err);
    }

    if (problem.has_exact_hvp()) {
      Vector weights(m);
      double total = 0.0;
      for (double& w : weights) total += (w = uniform(rng) + 1e-3);
      for (double& w : weights) w /= total;
      Vector v(n);
      for (double& e : v) e = normal(rng);

      const Vector hv = problem.exact_hvp(x, weights, v);
      const double h = 1e-5 / std::max(1.0, kernels::norm2(v));
      ParamVec plus = x, minus = x;
      kernels::axpy(h, v, plus);
      kernels::axpy(-h, v, minus);
      const GradientSet gp = problem.gradients(plus);
      const GradientSet gm = problem.gradients(minus);
      Vector fd_hv(n, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j)
          fd_hv[j] += weights[i] * (gp.row(i)[j] - gm.row(i)[j]) / (2.0 * h);
      }
      if (!all_finite(hv)) {
        report.passed = false;
        report.failures.push_back("non-finite Hessian-vector product at " + describe_point(x));
      } else {
        report.hvp_rel_error = std::max(*report.hvp_rel_error, relative_error(hv, fd_hv));
      }
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (report.gradient_rel_error[i] > options.gradient_tolerance) {
      report.passed = false;
      report.failures.push_back(fmt::format("objective {}: gradient relative error {:.3g} exceeds {:.3g}",
                                            i + 1, report.gradient_rel_error[i],
                                            options.gradient_tolerance));
    }
  }
  if (report.hvp_rel_error && *report.hvp_rel_error > options.hvp_tolerance) {
    report.passed = false;
    report.failures.push_back(fmt::format("Hessian-vector product relative error {:.3g} exceeds {:.3g}",
                                          *report.hvp_rel_error, options.hvp_tolerance));
  }
  return report;
}

}  // namespace pareto_tracer
