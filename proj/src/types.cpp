#include "pareto_tracer/types.hpp"

#include <cassert>
#include <cmath>

namespace pareto_tracer {

Vector DenseMatrix::multiply(std::span<const double> v) const {
  assert(v.size() == cols_);
  Vector out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += data_[i * cols_ + j] * v[j];
    out[i] = s;
  }
  return out;
}

bool DenseMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(i, j) != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

bool GradientSet::all_finite() const { return pareto_tracer::all_finite(data_); }

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string to_string(MethodTag tag) {
  switch (tag) {
    case MethodTag::kSmgd: return "SMGD";
    case MethodTag::kPcPredicted: return "PC_PREDICTED";
    case MethodTag::kPcCorrected: return "PC_CORRECTED";
    case MethodTag::kScalarized: return "SCALARIZED";
  }
  return "UNKNOWN";
}

MethodTag method_tag_from_string(const std::string& s) {
  if (s == "SMGD") return MethodTag::kSmgd;
  if (s == "PC_PREDICTED") return MethodTag::kPcPredicted;
  if (s == "PC_CORRECTED") return MethodTag::kPcCorrected;
  if (s == "SCALARIZED") return MethodTag::kScalarized;
  throw Error("unknown method tag: " + s);
}

std::mt19937_64 make_rng(std::uint64_t seed, RngStream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace pareto_tracer
