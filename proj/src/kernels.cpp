#include "pareto_tracer/kernels.hpp"

#include <cassert>
#include <cmath>
#include <vector>

#include <omp.h>

namespace pareto_tracer::kernels {
namespace {

constexpr std::size_t kElementwiseParallelMin = 1 << 15;

std::size_t chunk_count(std::size_t n, std::size_t chunk) { return (n + chunk - 1) / chunk; }

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  if (n <= kReductionChunk) return serial::dot(x, y);

  const std::size_t chunks = chunk_count(n, kReductionChunk);
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t end = std::min(n, begin + kReductionChunk);
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += x[i] * y[i];
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() >= kElementwiseParallelMin)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, std::span<double> x) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() >= kElementwiseParallelMin)
  for (std::ptrdiff_t i = 0; i < n; ++i) x[i] *= a;
}

void lincomb(double a, std::span<const double> x, double b, std::span<const double> y,
             std::span<double> out) {
  assert(x.size() == y.size() && x.size() == out.size());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() >= kElementwiseParallelMin)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

Vector chunked_sum(std::size_t count, std::size_t chunk, std::size_t width,
                   const std::function<void(std::size_t, std::size_t, std::span<double>)>& body) {
  assert(chunk > 0);
  const std::size_t chunks = chunk_count(count, chunk);
  Vector total(width, 0.0);
  if (chunks == 0) return total;

  std::vector<double> partial(chunks * width, 0.0);
#pragma omp parallel for schedule(static) if (chunks > 1)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    body(begin, end, std::span<double>(partial.data() + static_cast<std::size_t>(c) * width, width));
  }
  for (std::size_t c = 0; c < chunks; ++c)
    for (std::size_t k = 0; k < width; ++k) total[k] += partial[c * width + k];
  return total;
}

namespace serial {

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(serial::dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(double a, std::span<double> x) {
  for (double& v : x) v *= a;
}

void lincomb(double a, std::span<const double> x, double b, std::span<const double> y,
             std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
}

Vector chunked_sum(std::size_t count, std::size_t /*chunk*/, std::size_t width,
                   const std::function<void(std::size_t, std::size_t, std::span<double>)>& body) {
  Vector total(width, 0.0);
  body(0, count, total);
  return total;
}

}  // namespace serial
}  // namespace pareto_tracer::kernels
