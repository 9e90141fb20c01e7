#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "pareto_tracer/kernels.hpp"
#include "pareto_tracer/problems.hpp"

namespace pareto_tracer {

QuadraticBiObjective::QuadraticBiObjective(ParamVec c1, ParamVec c2) : c1_(std::move(c1)), c2_(std::move(c2)) {
  if (c1_.size() != c2_.size() || c1_.empty())
    throw std::invalid_argument("QuadraticBiObjective: centers must be nonempty and of equal length");
}

QuadraticBiObjective::QuadraticBiObjective(ParamVec c1, ParamVec c2, DenseMatrix a1, DenseMatrix a2)
    : QuadraticBiObjective(std::move(c1), std::move(c2)) {
  const std::size_t n = c1_.size();
  DenseMatrix* mats[2] = {&a1, &a2};
  for (std::size_t i = 0; i < 2; ++i) {
    DenseMatrix& a = *mats[i];
    if (a.rows() != n || a.cols() != n) throw std::invalid_argument("QuadraticBiObjective: curvature shape mismatch");
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = r + 1; c < n; ++c)
        if (a(r, c) != a(c, r)) throw std::invalid_argument("QuadraticBiObjective: curvature must be symmetric");
    if (!a.is_identity()) a_[i] = std::move(a);
  }
}

QuadraticBiObjective QuadraticBiObjective::symmetric(std::size_t n, double separation, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("QuadraticBiObjective::symmetric: n must be >= 1");
  std::mt19937_64 rng = make_rng(seed, RngStream::kProblemInstance);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(n);
  double norm = 0.0;
  while (norm == 0.0) {
    for (double& v : u) v = normal(rng);
    norm = kernels::norm2(u);
  }
  ParamVec c1(n), c2(n);
  for (std::size_t j = 0; j < n; ++j) {
    c2[j] = 0.5 * separation * u[j] / norm;
    c1[j] = -c2[j];
  }
  return {std::move(c1), std::move(c2)};
}

DenseMatrix QuadraticBiObjective::curvature(std::size_t i) const {
  return a_[i] ? *a_[i] : DenseMatrix::identity(dimension());
}

Vector QuadraticBiObjective::apply_curvature(std::size_t i, std::span<const double> v) const {
  if (!a_[i]) return Vector(v.begin(), v.end());
  return a_[i]->multiply(v);
}

ObjectiveVec QuadraticBiObjective::evaluate(std::span<const double> x) const {
  ObjectiveVec f(2);
  Vector diff(x.size());
  for (std::size_t i = 0; i < 2; ++i) {
    kernels::lincomb(1.0, x, -1.0, center(i), diff);
    f[i] = 0.5 * kernels::dot(diff, apply_curvature(i, diff));
  }
  return f;
}

GradientSet QuadraticBiObjective::gradients(std::span<const double> x) const {
  GradientSet g(2, x.size());
  Vector diff(x.size());
  for (std::size_t i = 0; i < 2; ++i) {
    kernels::lincomb(1.0, x, -1.0, center(i), diff);
    const Vector ad = apply_curvature(i, diff);
    std::copy(ad.begin(), ad.end(), g.row(i).begin());
  }
  return g;
}

Vector QuadraticBiObjective::exact_hvp(std::span<const double>, std::span<const double> weights,
                                       std::span<const double> v) const {
  Vector out(v.size(), 0.0);
  for (std::size_t i = 0; i < 2; ++i) kernels::axpy(weights[i], apply_curvature(i, v), out);
  return out;
}

double QuadraticBiObjective::distance_to_pareto_set(std::span<const double> x) const {
  const std::size_t n = x.size();
  Vector seg(n), rel(n);
  kernels::lincomb(1.0, c2_, -1.0, c1_, seg);
  kernels::lincomb(1.0, x, -1.0, c1_, rel);
  const double len2 = kernels::dot(seg, seg);
  const double t = len2 == 0.0 ? 0.0 : std::clamp(kernels::dot(rel, seg) / len2, 0.0, 1.0);
  kernels::axpy(-t, seg, rel);
  return kernels::norm2(rel);
}

std::vector<ObjectiveVec> analytic_front(const QuadraticBiObjective& problem, int resolution, bool numerical) {
  if (resolution < 1) throw std::invalid_argument("analytic_front: resolution must be >= 1");
  if (!problem.identity_curvature() && !numerical)
    throw Error("analytic_front: non-identity curvature requires numerical tracing");

  const std::size_t n = problem.dimension();
  const ParamVec& c1 = problem.center(0);
  const ParamVec& c2 = problem.center(1);
  std::vector<ObjectiveVec> front;
  front.reserve(static_cast<std::size_t>(resolution) + 1);

  if (problem.identity_curvature()) {
    Vector seg(n);
    kernels::lincomb(1.0, c2, -1.0, c1, seg);
    const double len2 = kernels::dot(seg, seg);
    for (int k = 0; k <= resolution; ++k) {
      const double t = static_cast<double>(k) / resolution;
      front.push_back({0.5 * t * t * len2, 0.5 * (1.0 - t) * (1.0 - t) * len2});
    }
    return front;
  }

  // Weighted-sum minimizers; convex objectives make this sweep the whole front.
  auto to_eigen = [n](const DenseMatrix& m) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
    return a;
  };
  const Eigen::MatrixXd a1 = to_eigen(problem.curvature(0));
  const Eigen::MatrixXd a2 = to_eigen(problem.curvature(1));
  const Eigen::VectorXd e1 = Eigen::Map<const Eigen::VectorXd>(c1.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd e2 = Eigen::Map<const Eigen::VectorXd>(c2.data(), static_cast<Eigen::Index>(n));
  for (int k = 0; k <= resolution; ++k) {
    const double t = static_cast<double>(k) / resolution;
    const Eigen::MatrixXd lhs = (1.0 - t) * a1 + t * a2;
    const Eigen::VectorXd rhs = (1.0 - t) * (a1 * e1) + t * (a2 * e2);
    const Eigen::VectorXd x = lhs.ldlt().solve(rhs);
    front.push_back(problem.evaluate(std::span<const double>(x.data(), n)));
  }
  return front;
}

}  // namespace pareto_tracer
