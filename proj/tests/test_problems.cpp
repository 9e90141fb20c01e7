#include <doctest.h>

#include <sstream>

#include <omp.h>

#include "oracles.hpp"
#include "pareto_tracer/kernels.hpp"
#include "pareto_tracer/metrics.hpp"
#include "pareto_tracer/mgd.hpp"
#include "pareto_tracer/problems.hpp"

using namespace pareto_tracer;

namespace {

// Plain gradient descent on one objective.
ParamVec descend(const MooProblem& p, std::size_t objective, ParamVec x, double step, int iters) {
  for (int k = 0; k < iters; ++k) {
    const GradientSet g = p.gradients(x);
    kernels::axpy(-step, g.row(objective), x);
  }
  return x;
}

}  // namespace

TEST_CASE("quadratic closed-form front") {
  const QuadraticBiObjective q(Vector{0.0, 0.0}, Vector{1.0, 0.0});
  const auto f = analytic_front(q, 2);
  REQUIRE(f.size() == 3);
  CHECK(f[0] == ObjectiveVec{0.0, 0.5});
  CHECK(f[1] == ObjectiveVec{0.125, 0.125});
  CHECK(f[2] == ObjectiveVec{0.5, 0.0});
  CHECK(analytic_front(q, 1).size() == 2);
  CHECK_THROWS_AS(analytic_front(q, 0), std::invalid_argument);

  const QuadraticBiObjective same(Vector{1.0, 2.0}, Vector{1.0, 2.0});
  const auto single = pareto_filter(analytic_front(same, 10));
  REQUIRE(single.size() == 1);
  CHECK(single[0] == ObjectiveVec{0.0, 0.0});
}

TEST_CASE("non-identity curvature needs numerical tracing") {
  DenseMatrix a1 = DenseMatrix::identity(2), a2 = DenseMatrix::identity(2);
  a1(0, 0) = 4.0;
  a2(1, 1) = 3.0;
  a2(0, 1) = a2(1, 0) = 0.5;
  const QuadraticBiObjective q(Vector{0.0, 0.0}, Vector{1.0, 1.0}, a1, a2);
  CHECK_FALSE(q.identity_curvature());
  CHECK_THROWS_AS(analytic_front(q, 10), Error);
  const auto front = analytic_front(q, 20, true);
  // Every traced point is a weighted-sum minimizer, hence Pareto-stationary: compare
  // against gradient descent on the same weighted sum.
  for (int k : {0, 5, 13, 20}) {
    const double t = k / 20.0;
    ParamVec x = {0.3, 0.3};
    for (int it = 0; it < 5000; ++it) {
      const GradientSet g = q.gradients(x);
      for (int j = 0; j < 2; ++j) x[j] -= 0.05 * ((1 - t) * g.row(0)[j] + t * g.row(1)[j]);
    }
    CHECK(oracle::max_abs_diff(q.evaluate(x), front[static_cast<std::size_t>(k)]) < 1e-10);
  }
  CHECK(q.curvature(0)(0, 0) == 4.0);
}

TEST_CASE("segment points of the identity quadratic are stationary") {
  const auto q = QuadraticBiObjective::symmetric(30, 7.0, 2);
  CHECK(q.identity_curvature());
  CHECK(q.curvature(1).is_identity());
  for (double t : {0.0, 0.1, 0.5, 0.77, 1.0}) {
    Vector x(30);
    for (std::size_t j = 0; j < 30; ++j) x[j] = (1 - t) * q.center(0)[j] + t * q.center(1)[j];
    CHECK(oracle::norm(min_norm_weights(q.gradients(x)).direction) <= 1e-10);
    CHECK(q.distance_to_pareto_set(x) < 1e-12);
  }
  // symmetric(): centers at -/+ separation / 2 along a unit vector.
  Vector diff(30);
  for (std::size_t j = 0; j < 30; ++j) diff[j] = q.center(1)[j] - q.center(0)[j];
  CHECK(oracle::norm(diff) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("distance_to_pareto_set matches the segment oracle") {
  const auto q = QuadraticBiObjective::symmetric(6, 3.0, 8);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Vector x = oracle::gaussian(6, rng, 2.0);
    CHECK(q.distance_to_pareto_set(x) ==
          doctest::Approx(oracle::distance_to_segment(x, q.center(0), q.center(1))).epsilon(1e-12));
  }
}

TEST_CASE("Fonseca-Fleming") {
  const FonsecaFleming ff(3);
  const double s = 1.0 / std::sqrt(3.0);
  const ObjectiveVec at_min1 = ff.evaluate(Vector{s, s, s});
  CHECK(at_min1[0] == doctest::Approx(0.0));
  CHECK(at_min1[1] == doctest::Approx(1.0 - std::exp(-4.0)));
  const auto front = analytic_front(ff, 100);
  CHECK(front.size() == 101);
  CHECK(pareto_filter(front).size() == 101);
  for (const ObjectiveVec& f : front) {
    CHECK(f[0] >= 0.0);
    CHECK(f[0] < 1.0);
  }
  // Concave front: the midpoint lies above the chord between the endpoints.
  CHECK(front[50][0] + front[50][1] > 0.5 * (front[0][0] + front[0][1] + front[100][0] + front[100][1]));
}

TEST_CASE("fairness dataset generation") {
  const FairnessDataset a = generate_fairness_dataset(5, 300, 7, 0.3);
  const FairnessDataset b = generate_fairness_dataset(5, 300, 7, 0.3);
  CHECK(a == b);
  CHECK(a.samples == 300);
  CHECK(a.x.size() == 300 * 7);
  const FairnessDataset c = generate_fairness_dataset(6, 300, 7, 0.3);
  CHECK_FALSE(a == c);
  CHECK_THROWS_AS(generate_fairness_dataset(0, 10, 7, 0.3), ConfigError);
  CHECK_THROWS_AS(generate_fairness_dataset(0, 100, 0, 0.3), ConfigError);
  CHECK_THROWS_AS(generate_fairness_dataset(0, 100, 3, 1.5), ConfigError);
}

TEST_CASE("fairness CSV round-trips exactly") {
  const FairnessDataset a = generate_fairness_dataset(1, 60, 4, 0.3);
  std::stringstream s;
  write_fairness_csv(a, s);
  CHECK(s.str().rfind("x_1,x_2,x_3,x_4,label,group\n", 0) == 0);
  const FairnessDataset b = read_fairness_csv(s);
  CHECK(a == b);

  std::stringstream bad("x_1,label,group\n0.5,2,0\n");
  CHECK_THROWS_AS(read_fairness_csv(bad), ConfigError);
  std::stringstream ragged("x_1,label,group\n0.5,1\n");
  CHECK_THROWS_AS(read_fairness_csv(ragged), ConfigError);
  std::stringstream one_group("x_1,label,group\n0.5,1,0\n0.1,0,0\n");
  CHECK_THROWS_AS(read_fairness_csv(one_group), ConfigError);
  std::stringstream junk("x_1,label,group\nabc,1,0\n");
  CHECK_THROWS_AS(read_fairness_csv(junk), ConfigError);
}

TEST_CASE("fairness objectives are nonnegative and finite") {
  const SyntheticFairness p(generate_fairness_dataset(0, 500, 20, 0.3));
  CHECK(p.dimension() == 21);
  std::mt19937_64 rng(1);
  for (double scale : {0.0, 1.0, 100.0, 1e6}) {
    const Vector x = oracle::gaussian(21, rng, scale);
    const ObjectiveVec f = p.evaluate(x);
    CHECK(all_finite(f));
    CHECK(f[0] >= 0.0);
    CHECK(f[1] >= 0.0);
    CHECK(p.gradients(x).all_finite());
    const auto [l0, l1] = p.group_losses(x);
    CHECK(f[1] == doctest::Approx((l0 - l1) * (l0 - l1)).epsilon(1e-12));
  }
}

TEST_CASE("parallel fairness evaluations match the serial reference") {
  const FairnessDataset d = generate_fairness_dataset(2, 777, 9, 0.3);
  const SyntheticFairness par(d, Execution::kParallel), ser(d, Execution::kSerial);
  std::mt19937_64 rng(4);
  const Vector x = oracle::gaussian(10, rng, 0.3), v = oracle::gaussian(10, rng);
  const Vector w = {0.4, 0.6};
  // The serial reference sums in one pass, the parallel kernel per chunk.
  CHECK(oracle::rel_error(par.evaluate(x), ser.evaluate(x)) < 1e-12);
  const GradientSet gp = par.gradients(x), gs = ser.gradients(x);
  for (std::size_t i = 0; i < 2; ++i) CHECK(oracle::rel_error(gp.row(i), gs.row(i)) < 1e-12);
  CHECK(oracle::rel_error(par.exact_hvp(x, w, v), ser.exact_hvp(x, w, v)) < 1e-12);

  // Chunked sums do not depend on the thread count.
  const int threads = omp_get_max_threads();
  omp_set_num_threads(1);
  const ObjectiveVec f1 = par.evaluate(x);
  const GradientSet g1 = par.gradients(x);
  omp_set_num_threads(4);
  CHECK(par.evaluate(x) == f1);
  CHECK(par.gradients(x) == g1);
  omp_set_num_threads(threads);
}

TEST_CASE("group imbalance controls the accuracy-parity conflict") {
  const SyntheticFairness none(generate_fairness_dataset(0, 500, 20, 0.0));
  const ParamVec x_acc = descend(none, 0, ParamVec(21, 0.0), 0.5, 3000);
  CHECK(none.evaluate(x_acc)[1] <= 1e-2);

  const SyntheticFairness conflict(generate_fairness_dataset(0, 500, 20, 0.3));
  const ParamVec x1 = descend(conflict, 0, ParamVec(21, 0.0), 0.5, 3000);
  // The parity objective reaches zero at the start when both group losses are log 2;
  // descend from the accuracy optimum instead so the comparison is not trivial.
  const ParamVec x2 = descend(conflict, 1, x1, 0.5, 3000);
  const double f2_at_acc = conflict.evaluate(x1)[1];
  const double f2_at_fair = conflict.evaluate(x2)[1];
  CHECK(f2_at_acc - f2_at_fair > 1e-4);
}

TEST_CASE("problem constructors reject bad shapes") {
  CHECK_THROWS_AS(QuadraticBiObjective(Vector{}, Vector{}), std::invalid_argument);
  CHECK_THROWS_AS(QuadraticBiObjective(Vector{1.0}, Vector{1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(QuadraticBiObjective::symmetric(0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(FonsecaFleming(0), std::invalid_argument);
  DenseMatrix asym = DenseMatrix::identity(2);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(QuadraticBiObjective(Vector{0.0, 0.0}, Vector{1.0, 0.0}, asym, DenseMatrix::identity(2)),
                  std::invalid_argument);
}
