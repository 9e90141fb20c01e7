#pragma once

// Dense vector kernels used by the solvers, operators and problems.
//
// The default entry points are OpenMP-parallel. Reductions are split into
// fixed-size chunks whose partial sums are combined in chunk order, so the
// result is bitwise reproducible for any thread count. Vectors shorter than
// one chunk take the same code path as the serial reference.
//
// The `serial` namespace holds straightforward single-loop references used by
// tests and by the benchmark target.

#include <cstddef>
#include <functional>
#include <span>

#include "pareto_tracer/types.hpp"

namespace pareto_tracer::kernels {

inline constexpr std::size_t kReductionChunk = 4096;

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// y <- a*x + y
void axpy(double a, std::span<const double> x, std::span<double> y);
/// x <- a*x
void scale(double a, std::span<double> x);
/// out <- a*x + b*y
void lincomb(double a, std::span<const double> x, double b, std::span<const double> y,
             std::span<double> out);

/// Sums `width` accumulators over [0, count) split into chunks of `chunk` items.
/// `body(begin, end, acc)` adds the contribution of items [begin, end) into acc.
/// Chunk partials are reduced in chunk order, independent of the thread count.
Vector chunked_sum(std::size_t count, std::size_t chunk, std::size_t width,
                   const std::function<void(std::size_t, std::size_t, std::span<double>)>& body);

namespace serial {

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(double a, std::span<double> x);
void lincomb(double a, std::span<const double> x, double b, std::span<const double> y,
             std::span<double> out);
Vector chunked_sum(std::size_t count, std::size_t chunk, std::size_t width,
                   const std::function<void(std::size_t, std::size_t, std::span<double>)>& body);

}  // namespace serial

}  // namespace pareto_tracer::kernels
