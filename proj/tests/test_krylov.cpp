#include <doctest.h>

#include "oracles.hpp"
#include "pareto_tracer/krylov.hpp"

using namespace pareto_tracer;

namespace {

DenseMatrix diag(std::initializer_list<double> d) {
  DenseMatrix m(d.size(), d.size());
  std::size_t i = 0;
  for (double v : d) m(i, i) = v, ++i;
  return m;
}

DenseMatrix two_by_two() {
  DenseMatrix m(2, 2);
  m(0, 0) = 2.0;
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  m(1, 1) = 2.0;
  return m;
}

SolverConfig tight(int max_iter = 50) { return {1e-10, max_iter, true}; }

constexpr SolverKind kAll[] = {SolverKind::kCg, SolverKind::kCr, SolverKind::kMinres};

void check_monotone(const SolveReport& r) {
  REQUIRE(r.residual_history.has_value());
  const Vector& h = *r.residual_history;
  for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k] <= h[k - 1] + 1e-12);
}

}  // namespace

TEST_CASE("identity operator is solved in one iteration by every solver") {
  const auto op = LinearOperator::from_dense(DenseMatrix::identity(3));
  const Vector b = {1.0, 2.0, 3.0};
  for (SolverKind k : kAll) {
    CAPTURE(to_string(k));
    const SolveResult r = solve(k, op, b, tight());
    CHECK(r.report.iterations_used == 1);
    CHECK(oracle::max_abs_diff(r.solution, b) < 1e-14);
    CHECK(r.report.converged);
  }
  const SolveResult m = minres_solve(LinearOperator::from_dense(DenseMatrix::identity(2)), Vector{5.0, 0.0}, tight());
  CHECK(m.report.iterations_used == 1);
  CHECK(m.solution == Vector{5.0, 0.0});
}

TEST_CASE("diag(1,2,4) b=(1,2,4) gives (1,1,1) within 3 iterations") {
  const auto op = LinearOperator::from_dense(diag({1.0, 2.0, 4.0}));
  for (SolverKind k : kAll) {
    CAPTURE(to_string(k));
    const SolveResult r = solve(k, op, Vector{1.0, 2.0, 4.0}, tight());
    CHECK(r.report.iterations_used <= 3);
    CHECK(r.report.final_residual_norm <= 1e-10);
    CHECK(oracle::max_abs_diff(r.solution, Vector{1.0, 1.0, 1.0}) < 1e-9);
  }
}

TEST_CASE("[[2,1],[1,2]] b=(3,3) gives (1,1) and solvers agree") {
  const auto op = LinearOperator::from_dense(two_by_two());
  const Vector b = {3.0, 3.0};
  const SolveResult cg = cg_solve(op, b, tight());
  const SolveResult cr = cr_solve(op, b, tight());
  const SolveResult mr = minres_solve(op, b, tight());
  CHECK(oracle::max_abs_diff(cg.solution, Vector{1.0, 1.0}) < 1e-10);
  CHECK(oracle::max_abs_diff(cr.solution, Vector{1.0, 1.0}) < 1e-10);
  CHECK(oracle::max_abs_diff(mr.solution, cg.solution) < 1e-8);
  check_monotone(cr.report);
  check_monotone(mr.report);
}

TEST_CASE("Lanczos MINRES handles an indefinite diagonal") {
  const SolveResult r = minres_solve(LinearOperator::from_dense(diag({1.0, -1.0})), Vector{2.0, 3.0}, tight());
  CHECK(r.report.iterations_used <= 2);
  CHECK(oracle::max_abs_diff(r.solution, Vector{2.0, -3.0}) < 1e-10);
}

TEST_CASE("dense_solve_oracle") {
  CHECK(dense_solve_oracle(DenseMatrix::identity(3), Vector{1.0, 2.0, 3.0}) == Vector{1.0, 2.0, 3.0});
  CHECK(oracle::max_abs_diff(dense_solve_oracle(diag({2.0, 5.0}), Vector{2.0, 5.0}), Vector{1.0, 1.0}) < 1e-15);
  std::mt19937_64 rng(3);
  const DenseMatrix a = oracle::random_spd(40, rng);
  const Vector b = oracle::gaussian(40, rng);
  const Vector x = dense_solve_oracle(a, b);
  Vector r = oracle::matvec(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  CHECK(oracle::norm(r) <= 1e-9 * oracle::norm(b));
  CHECK_THROWS_AS(dense_solve_oracle(DenseMatrix(2, 2), Vector{1.0, 1.0}), NumericalError);
}

TEST_CASE("CG finite termination and cross-solver agreement on seeded SPD systems") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 10 + static_cast<std::size_t>(trial) * 9;  // up to 181
    const DenseMatrix a = oracle::random_spd(n, rng);
    const Vector b = oracle::gaussian(n, rng);
    const auto op = LinearOperator::from_dense(a);
    const Vector want = dense_solve_oracle(a, b);
    for (SolverKind k : kAll) {
      CAPTURE(trial);
      CAPTURE(to_string(k));
      const SolveResult r = solve(k, op, b, tight(static_cast<int>(n) + 5));
      CHECK(r.report.converged);
      CHECK(oracle::rel_error(r.solution, want) <= 1e-7);
      CHECK(r.report.matvec_count <= r.report.iterations_used + 1);
      if (k != SolverKind::kCg) check_monotone(r.report);
    }
  }
}

TEST_CASE("CG keeps the recursive residual close to b - Hv") {
  std::mt19937_64 rng(8);
  const DenseMatrix a = oracle::random_spd(30, rng);
  const Vector b = oracle::gaussian(30, rng);
  const SolveResult r = cg_solve(LinearOperator::from_dense(a), b, {1e-6, 12, true});
  Vector res = oracle::matvec(a, r.solution);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] = b[i] - res[i];
  CHECK(std::abs(oracle::norm(res) - r.report.final_residual_norm) < 1e-10 * oracle::norm(b));
}

TEST_CASE("zero right-hand side returns zero with no iterations") {
  const auto op = LinearOperator::from_dense(two_by_two());
  for (SolverKind k : kAll) {
    const SolveResult r = solve(k, op, Vector{0.0, 0.0}, tight());
    CHECK(r.solution == Vector{0.0, 0.0});
    CHECK(r.report.iterations_used == 0);
    CHECK(r.report.matvec_count == 0);
    CHECK(r.report.converged);
  }
}

TEST_CASE("max_iter caps the work and converged reflects the tolerance") {
  std::mt19937_64 rng(4);
  const DenseMatrix a = oracle::random_spd(50, rng);
  const Vector b = oracle::gaussian(50, rng);
  for (SolverKind k : kAll) {
    const SolveResult r = solve(k, LinearOperator::from_dense(a), b, {1e-14, 3, true});
    CHECK(r.report.iterations_used == 3);
    CHECK(r.report.residual_history->size() == 3);
    CHECK(r.report.converged == (r.report.final_residual_norm <= 1e-14));
    CHECK_FALSE(r.report.converged);
  }
  const SolveResult quiet = cg_solve(LinearOperator::from_dense(a), b, {1e-6, 50, false});
  CHECK_FALSE(quiet.report.residual_history.has_value());
}

TEST_CASE("breakdown raises SolverBreakdown with the partial iterate") {
  // Zero operator: p'Hp = 0 on the first step.
  const LinearOperator zero(2, [](std::span<const double>, std::span<double> out) {
    out[0] = 0.0;
    out[1] = 0.0;
  });
  for (SolverKind k : {SolverKind::kCg, SolverKind::kCr}) {
    try {
      solve(k, zero, Vector{1.0, 0.0}, tight());
      FAIL("expected breakdown");
    } catch (const SolverBreakdown& e) {
      CHECK(e.partial_solution().size() == 2);
    }
  }
  CHECK_THROWS_AS(minres_solve(zero, Vector{1.0, 0.0}, tight()), SolverBreakdown);
}

TEST_CASE("operators reject non-finite output and bad shapes") {
  const LinearOperator nan_op(1, [](std::span<const double>, std::span<double> out) { out[0] = std::nan(""); });
  CHECK_THROWS_AS(cg_solve(nan_op, Vector{1.0}, tight()), NumericalError);
  const auto op = LinearOperator::from_dense(two_by_two());
  CHECK_THROWS_AS(cg_solve(op, Vector{1.0}, tight()), std::invalid_argument);
}

TEST_CASE("solver config validation and names") {
  CHECK_THROWS_AS(SolverConfig({0.0, 5, true}).validate(), ConfigError);
  CHECK_THROWS_AS(SolverConfig({1e-6, 0, true}).validate(), ConfigError);
  CHECK(solver_kind_from_string("cg") == SolverKind::kCg);
  CHECK(solver_kind_from_string("minres") == SolverKind::kCr);
  CHECK(solver_kind_from_string("cr") == SolverKind::kCr);
  CHECK(solver_kind_from_string("minres-lanczos") == SolverKind::kMinres);
  CHECK(to_string(SolverKind::kCr) == "MINRES");
  CHECK_THROWS_AS(solver_kind_from_string("gmres"), ConfigError);
}

TEST_CASE("from_dense operators are linear and symmetric") {
  std::mt19937_64 rng(9);
  const DenseMatrix a = oracle::random_spd(12, rng);
  const auto op = LinearOperator::from_dense(a);
  const Vector u = oracle::gaussian(12, rng), w = oracle::gaussian(12, rng);
  Vector comb(12);
  for (std::size_t i = 0; i < 12; ++i) comb[i] = 2.0 * u[i] - 3.0 * w[i];
  const Vector lhs = op(comb), au = op(u), aw = op(w);
  for (std::size_t i = 0; i < 12; ++i) CHECK(std::abs(lhs[i] - (2.0 * au[i] - 3.0 * aw[i])) < 1e-10);
  CHECK(std::abs(oracle::dot(op(u), w) - oracle::dot(u, op(w))) < 1e-8);
}
