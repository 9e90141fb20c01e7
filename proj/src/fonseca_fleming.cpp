#include <cmath>

#include "pareto_tracer/kernels.hpp"
#include "pareto_tracer/problems.hpp"

namespace pareto_tracer {
namespace {

// s = sum_j (x_j - shift)^2
double shifted_norm2(std::span<const double> x, double shift) {
  double s = 0.0;
  for (double v : x) s += (v - shift) * (v - shift);
  return s;
}

}  // namespace

FonsecaFleming::FonsecaFleming(std::size_t n) : n_(n), offset_(1.0 / std::sqrt(static_cast<double>(n))) {
  if (n == 0) throw std::invalid_argument("FonsecaFleming: n must be >= 1");
}

ObjectiveVec FonsecaFleming::evaluate(std::span<const double> x) const {
  return {1.0 - std::exp(-shifted_norm2(x, offset_)), 1.0 - std::exp(-shifted_norm2(x, -offset_))};
}

GradientSet FonsecaFleming::gradients(std::span<const double> x) const {
  GradientSet g(2, n_);
  const double shifts[2] = {offset_, -offset_};
  for (std::size_t i = 0; i < 2; ++i) {
    const double e = std::exp(-shifted_norm2(x, shifts[i]));
    for (std::size_t j = 0; j < n_; ++j) g.row(i)[j] = 2.0 * e * (x[j] - shifts[i]);
  }
  return g;
}

// H_i = e_i (2 I - 4 r r'), r = x - shift_i
Vector FonsecaFleming::exact_hvp(std::span<const double> x, std::span<const double> weights,
                                 std::span<const double> v) const {
  Vector out(n_, 0.0);
  Vector r(n_);
  const double shifts[2] = {offset_, -offset_};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < n_; ++j) r[j] = x[j] - shifts[i];
    const double e = std::exp(-kernels::dot(r, r));
    const double rv = kernels::dot(r, v);
    for (std::size_t j = 0; j < n_; ++j) out[j] += weights[i] * e * (2.0 * v[j] - 4.0 * rv * r[j]);
  }
  return out;
}

std::vector<ObjectiveVec> analytic_front(const FonsecaFleming& problem, int resolution) {
  if (resolution < 1) throw std::invalid_argument("analytic_front: resolution must be >= 1");
  const std::size_t n = problem.dimension();
  const double bound = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<ObjectiveVec> front;
  front.reserve(static_cast<std::size_t>(resolution) + 1);
  ParamVec x(n);
  // Ordered by increasing f1.
  for (int k = 0; k <= resolution; ++k) {
    const double t = bound - 2.0 * bound * static_cast<double>(k) / resolution;
    std::fill(x.begin(), x.end(), t);
    front.push_back(problem.evaluate(x));
  }
  return front;
}

}  // namespace pareto_tracer
