#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pareto_tracer/types.hpp"

namespace pareto_tracer {

/// A differentiable multi-objective problem with m objectives over R^n.
///
/// Implementations must be pure and reentrant: the same x yields bitwise
/// identical outputs, and concurrent calls are allowed.
class MooProblem {
 public:
  virtual ~MooProblem() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::size_t objective_count() const = 0;

  virtual ObjectiveVec evaluate(std::span<const double> x) const = 0;
  virtual GradientSet gradients(std::span<const double> x) const = 0;

  /// True when exact_hvp is implemented analytically.
  virtual bool has_exact_hvp() const { return false; }

  /// (sum_i weights_i * H_i(x)) * v. Throws Error when unsupported.
  virtual Vector exact_hvp(std::span<const double> x, std::span<const double> weights,
                           std::span<const double> v) const;
};

/// Forwards to another problem and counts every call. Used for cost accounting.
class CountingProblem final : public MooProblem {
 public:
  explicit CountingProblem(const MooProblem& inner) : inner_(inner) {}

  std::string name() const override { return inner_.name(); }
  std::size_t dimension() const override { return inner_.dimension(); }
  std::size_t objective_count() const override { return inner_.objective_count(); }

  ObjectiveVec evaluate(std::span<const double> x) const override;
  GradientSet gradients(std::span<const double> x) const override;
  bool has_exact_hvp() const override { return inner_.has_exact_hvp(); }
  Vector exact_hvp(std::span<const double> x, std::span<const double> weights,
                   std::span<const double> v) const override;

  std::int64_t objective_evaluations() const { return evaluations_.load(); }
  std::int64_t gradient_evaluations() const { return gradient_calls_.load(); }
  std::int64_t hvp_evaluations() const { return hvp_calls_.load(); }

 private:
  const MooProblem& inner_;
  mutable std::atomic<std::int64_t> evaluations_{0};
  mutable std::atomic<std::int64_t> gradient_calls_{0};
  mutable std::atomic<std::int64_t> hvp_calls_{0};
};

struct ValidationReport {
  bool passed = true;
  /// Max relative error of each gradient row against central differences, over all probes.
  std::vector<double> gradient_rel_error;
  /// Max relative error of exact_hvp against differenced gradients; empty if no exact HVP.
  std::optional<double> hvp_rel_error;
  bool pure = true;
  std::vector<std::string> failures;
};

struct ValidationOptions {
  double gradient_tolerance = 1e-6;
  double hvp_tolerance = 1e-4;
  /// Standard deviation of the Gaussian probe points.
  double probe_scale = 1.0;
};

/// Checks analytic gradients and HVPs at `probe_count` seeded random points.
ValidationReport validate_problem(const MooProblem& problem, int probe_count, std::uint64_t seed,
                                  const ValidationOptions& options = {});

/// Fourth-order central-difference gradient of every objective, step h_j = 1e-3 * (1 + |x_j|).
/// The wide stencil keeps rounding small when objective values dwarf their gradients.
GradientSet finite_difference_gradients(const MooProblem& problem, std::span<const double> x);

}  // namespace pareto_tracer
