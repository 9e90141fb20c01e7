#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pareto_tracer/problem.hpp"

namespace pareto_tracer {

/// f_i(x) = 1/2 (x - c_i)' A_i (x - c_i), i = 1, 2.
class QuadraticBiObjective final : public MooProblem {
 public:
  /// Identity curvatures.
  QuadraticBiObjective(ParamVec c1, ParamVec c2);
  QuadraticBiObjective(ParamVec c1, ParamVec c2, DenseMatrix a1, DenseMatrix a2);

  /// Centers at -/+ (separation / 2) u for a seeded random unit vector u, so the
  /// Pareto set passes through the origin.
  static QuadraticBiObjective symmetric(std::size_t n, double separation, std::uint64_t seed);

  std::string name() const override { return "quadratic"; }
  std::size_t dimension() const override { return c1_.size(); }
  std::size_t objective_count() const override { return 2; }
  ObjectiveVec evaluate(std::span<const double> x) const override;
  GradientSet gradients(std::span<const double> x) const override;
  bool has_exact_hvp() const override { return true; }
  Vector exact_hvp(std::span<const double> x, std::span<const double> weights,
                   std::span<const double> v) const override;

  const ParamVec& center(std::size_t i) const { return i == 0 ? c1_ : c2_; }
  bool identity_curvature() const { return !a_[0] && !a_[1]; }
  DenseMatrix curvature(std::size_t i) const;
  /// Distance from x to the segment [c1, c2] (the Pareto set for identity curvature).
  double distance_to_pareto_set(std::span<const double> x) const;

 private:
  Vector apply_curvature(std::size_t i, std::span<const double> v) const;

  ParamVec c1_, c2_;
  std::optional<DenseMatrix> a_[2];
};

/// Front samples t = 0, 1/R, ..., 1. Identity curvature uses the segment
/// (1 - t) c1 + t c2; other curvatures need `numerical` and use the weighted-sum
/// minimizer ((1 - t) A1 + t A2)^-1 ((1 - t) A1 c1 + t A2 c2).
std::vector<ObjectiveVec> analytic_front(const QuadraticBiObjective& problem, int resolution,
                                         bool numerical = false);

/// f_{1,2}(x) = 1 - exp(-sum_j (x_j -/+ 1/sqrt(n))^2).
class FonsecaFleming final : public MooProblem {
 public:
  explicit FonsecaFleming(std::size_t n = 3);

  std::string name() const override { return "fonseca_fleming"; }
  std::size_t dimension() const override { return n_; }
  std::size_t objective_count() const override { return 2; }
  ObjectiveVec evaluate(std::span<const double> x) const override;
  GradientSet gradients(std::span<const double> x) const override;
  bool has_exact_hvp() const override { return true; }
  Vector exact_hvp(std::span<const double> x, std::span<const double> weights,
                   std::span<const double> v) const override;

 private:
  std::size_t n_;
  double offset_;
};

/// Pareto set x_j = t for t in [-1/sqrt(n), 1/sqrt(n)], sampled at R + 1 points.
std::vector<ObjectiveVec> analytic_front(const FonsecaFleming& problem, int resolution);

struct FairnessDataset {
  std::size_t samples = 0;
  std::size_t features = 0;
  /// Row-major samples x features.
  Vector x;
  std::vector<int> label;  // 0 / 1
  std::vector<int> group;  // A = 0 favored, A = 1 protected

  friend bool operator==(const FairnessDataset&, const FairnessDataset&) = default;
};

/// Deterministic synthetic data. Group 1 negatives are relabeled positive with
/// probability `group_imbalance`, which makes accuracy and parity conflict.
FairnessDataset generate_fairness_dataset(std::uint64_t seed, std::size_t samples, std::size_t features,
                                          double group_imbalance);

/// CSV with columns x_1..x_d, label, group. Values are written with 17 significant digits.
void write_fairness_csv(const FairnessDataset& data, std::ostream& out);
FairnessDataset read_fairness_csv(std::istream& in);

enum class Execution { kParallel, kSerial };

/// Logistic scorer sigma(w'a + b) with parameters x = (w, b), n = d + 1.
///   f1 = mean cross-entropy over all samples
///   f2 = (mean loss on group 0 - mean loss on group 1)^2
class SyntheticFairness final : public MooProblem {
 public:
  explicit SyntheticFairness(FairnessDataset data, Execution execution = Execution::kParallel);

  std::string name() const override { return "fairness"; }
  std::size_t dimension() const override { return data_.features + 1; }
  std::size_t objective_count() const override { return 2; }
  ObjectiveVec evaluate(std::span<const double> x) const override;
  GradientSet gradients(std::span<const double> x) const override;
  bool has_exact_hvp() const override { return true; }
  Vector exact_hvp(std::span<const double> x, std::span<const double> weights,
                   std::span<const double> v) const override;

  const FairnessDataset& data() const { return data_; }
  /// Mean loss on each group.
  std::pair<double, double> group_losses(std::span<const double> x) const;

 private:
  Vector sums(std::span<const double> x, std::span<const double> v, bool want_grad, bool want_hvp) const;

  FairnessDataset data_;
  Execution execution_;
  double count_[2] = {0.0, 0.0};
};

}  // namespace pareto_tracer
