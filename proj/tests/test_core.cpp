#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pareto_tracer/problem.hpp"
#include "pareto_tracer/problems.hpp"

using namespace pareto_tracer;

namespace {

// f1 = <c, x>, f2 = <-c, x>
class LinearProblem final : public MooProblem {
 public:
  explicit LinearProblem(Vector c) : c_(std::move(c)) {}
  std::string name() const override { return "linear"; }
  std::size_t dimension() const override { return c_.size(); }
  std::size_t objective_count() const override { return 2; }
  ObjectiveVec evaluate(std::span<const double> x) const override {
    const double s = oracle::dot(c_, x);
    return {s, -s};
  }
  GradientSet gradients(std::span<const double>) const override {
    GradientSet g(2, c_.size());
    for (std::size_t j = 0; j < c_.size(); ++j) {
      g.row(0)[j] = c_[j];
      g.row(1)[j] = -c_[j];
    }
    return g;
  }

 private:
  Vector c_;
};

// The quadratic with the second gradient row negated.
class NegatedGradient final : public MooProblem {
 public:
  explicit NegatedGradient(const QuadraticBiObjective& q) : q_(q) {}
  std::string name() const override { return "negated"; }
  std::size_t dimension() const override { return q_.dimension(); }
  std::size_t objective_count() const override { return 2; }
  ObjectiveVec evaluate(std::span<const double> x) const override { return q_.evaluate(x); }
  GradientSet gradients(std::span<const double> x) const override {
    GradientSet g = q_.gradients(x);
    for (double& v : g.row(1)) v = -v;
    return g;
  }

 private:
  const QuadraticBiObjective& q_;
};

}  // namespace

TEST_CASE("validate_problem: linear objectives have exact gradients") {
  const LinearProblem p({1.0, -2.0, 0.5});
  const ValidationReport r = validate_problem(p, 10, 1);
  CHECK(r.passed);
  for (double e : r.gradient_rel_error) CHECK(e < 1e-9);
  CHECK_FALSE(r.hvp_rel_error.has_value());
}

TEST_CASE("validate_problem: quadratic gradients match central differences") {
  const auto q = QuadraticBiObjective::symmetric(10, 4.0, 3);
  const ValidationReport r = validate_problem(q, 20, 7);
  CHECK(r.passed);
  CHECK(r.pure);
  for (double e : r.gradient_rel_error) CHECK(e <= 1e-7);
  REQUIRE(r.hvp_rel_error.has_value());
  CHECK(*r.hvp_rel_error <= 1e-4);
}

TEST_CASE("validate_problem: a negated gradient row is flagged with relative error near 2") {
  const auto q = QuadraticBiObjective::symmetric(6, 2.0, 0);
  const NegatedGradient bad(q);
  const ValidationReport r = validate_problem(bad, 5, 0);
  CHECK_FALSE(r.passed);
  CHECK(r.gradient_rel_error[0] < 1e-7);
  CHECK(r.gradient_rel_error[1] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_FALSE(r.failures.empty());
}

TEST_CASE("validate_problem rejects a zero probe count") {
  const LinearProblem p({1.0});
  CHECK_THROWS_AS(validate_problem(p, 0, 0), std::invalid_argument);
}

TEST_CASE("suite problems pass validation at 20 seeded points") {
  const auto q = QuadraticBiObjective::symmetric(50, 11.18, 0);
  const FonsecaFleming ff(3);
  const SyntheticFairness fair(generate_fairness_dataset(0, 500, 20, 0.3));
  const MooProblem* problems[] = {&q, &ff, &fair};
  for (const MooProblem* p : problems) {
    CAPTURE(p->name());
    ValidationOptions opt;
    // Logistic losses saturate for large scores; keep probes in the informative range.
    if (p->name() == "fairness") opt.probe_scale = 0.3;
    const ValidationReport r = validate_problem(*p, 20, 11, opt);
    CHECK(r.passed);
    for (double e : r.gradient_rel_error) CHECK(e <= 1e-6);
    REQUIRE(r.hvp_rel_error.has_value());
    CHECK(*r.hvp_rel_error <= 1e-4);
  }
}

TEST_CASE("purity and dimensional consistency") {
  const auto q = QuadraticBiObjective::symmetric(8, 3.0, 1);
  const FonsecaFleming ff(4);
  const SyntheticFairness fair(generate_fairness_dataset(2, 200, 5, 0.3));
  const MooProblem* problems[] = {&q, &ff, &fair};
  std::mt19937_64 rng(5);
  for (const MooProblem* p : problems) {
    const Vector x = oracle::gaussian(p->dimension(), rng);
    const ObjectiveVec f1 = p->evaluate(x), f2 = p->evaluate(x);
    CHECK(f1 == f2);
    CHECK(f1.size() == p->objective_count());
    const GradientSet g1 = p->gradients(x), g2 = p->gradients(x);
    CHECK(g1 == g2);
    CHECK(g1.objective_count() == p->objective_count());
    CHECK(g1.dimension() == p->dimension());
  }
}

TEST_CASE("finite_difference_gradients uses a relative step") {
  const auto q = QuadraticBiObjective::symmetric(5, 2.0, 4);
  const Vector x = {100.0, -50.0, 3.0, 0.0, 1e-3};
  const GradientSet fd = finite_difference_gradients(q, x);
  const GradientSet g = q.gradients(x);
  for (std::size_t i = 0; i < 2; ++i) CHECK(oracle::rel_error(fd.row(i), g.row(i)) < 1e-8);
}

TEST_CASE("CountingProblem counts each kind of call") {
  const auto q = QuadraticBiObjective::symmetric(4, 2.0, 0);
  const CountingProblem c(q);
  const Vector x(4, 0.5), w = {0.5, 0.5};
  c.evaluate(x);
  c.gradients(x);
  c.gradients(x);
  c.exact_hvp(x, w, x);
  CHECK(c.objective_evaluations() == 1);
  CHECK(c.gradient_evaluations() == 2);
  CHECK(c.hvp_evaluations() == 1);
}

TEST_CASE("default exact_hvp is unsupported") {
  const LinearProblem p({1.0, 2.0});
  CHECK_FALSE(p.has_exact_hvp());
  const Vector x(2, 0.0), w = {0.5, 0.5};
  CHECK_THROWS_AS(p.exact_hvp(x, w, x), Error);
}

TEST_CASE("method tags round-trip through strings") {
  for (MethodTag t : {MethodTag::kSmgd, MethodTag::kPcPredicted, MethodTag::kPcCorrected, MethodTag::kScalarized})
    CHECK(method_tag_from_string(to_string(t)) == t);
  CHECK(to_string(MethodTag::kPcCorrected) == "PC_CORRECTED");
  CHECK_THROWS(method_tag_from_string("nope"));
}

TEST_CASE("rng streams are independent and reproducible") {
  auto a = make_rng(7, RngStream::kDataset);
  auto b = make_rng(7, RngStream::kDataset);
  auto c = make_rng(7, RngStream::kInitialPoints);
  const auto va = a(), vb = b(), vc = c();
  CHECK(va == vb);
  CHECK(va != vc);
}

TEST_CASE("DenseMatrix helpers") {
  const DenseMatrix i3 = DenseMatrix::identity(3);
  CHECK(i3.is_identity());
  const Vector v = {1.0, 2.0, 3.0};
  CHECK(i3.multiply(v) == v);
  DenseMatrix a(2, 2);
  a(0, 1) = 1.0;
  CHECK_FALSE(a.is_identity());
}
