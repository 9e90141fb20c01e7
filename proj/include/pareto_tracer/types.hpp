#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pareto_tracer {

using Vector = std::vector<double>;
/// Decision vector x, length n.
using ParamVec = Vector;
/// Objective values f(x), length m.
using ObjectiveVec = Vector;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, divergence, solver breakdown. The CLI maps this to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Row-major dense matrix. Only used for explicit assembly in oracles and small problems.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const { return data_; }

  Vector multiply(std::span<const double> v) const;
  bool is_identity() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

/// Per-objective gradients: m rows of length n, stored contiguously.
class GradientSet {
 public:
  GradientSet() = default;
  GradientSet(std::size_t objectives, std::size_t dimension)
      : m_(objectives), n_(dimension), data_(objectives * dimension, 0.0) {}

  std::size_t objective_count() const { return m_; }
  std::size_t dimension() const { return n_; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

  bool all_finite() const;

  friend bool operator==(const GradientSet&, const GradientSet&) = default;

 private:
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  Vector data_;
};

enum class MethodTag { kSmgd, kPcPredicted, kPcCorrected, kScalarized };

std::string to_string(MethodTag tag);
MethodTag method_tag_from_string(const std::string& s);

struct ParetoPoint {
  ParamVec x;
  ObjectiveVec f;
  std::int64_t point_id = 0;
  std::optional<std::int64_t> parent_id;
  MethodTag method_tag = MethodTag::kSmgd;
  // Bookkeeping carried into points.csv.
  int solver_iters = 0;
  std::int64_t grad_evals_cum = 0;
  double wall_ms_cum = 0.0;
};

using ParetoArchive = std::vector<ParetoPoint>;

/// Cost accounting for one run. Counters only ever grow during a run.
struct RunRecord {
  std::string method;
  std::string problem;
  std::uint64_t seed = 0;
  std::int64_t wall_time_ms = 0;
  std::int64_t gradient_evals = 0;
  std::int64_t objective_evals = 0;
  std::int64_t hvp_applies = 0;
  std::int64_t solver_iterations_total = 0;
  std::int64_t points_generated = 0;
  std::int64_t predictor_fallbacks = 0;
};

bool all_finite(std::span<const double> v);

/// Random streams drawn from one user seed. Each consumer has its own stream so
/// that, for example, start points are not correlated with problem instances.
enum class RngStream : std::uint32_t {
  kProblemInstance = 1,
  kDataset = 2,
  kInitialPoints = 3,
  kBeta = 4,
  kProbes = 5,
};

std::mt19937_64 make_rng(std::uint64_t seed, RngStream stream);

}  // namespace pareto_tracer
