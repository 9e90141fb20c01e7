#pragma once

// Independent reference implementations used to check the library.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "pareto_tracer/krylov.hpp"
#include "pareto_tracer/metrics.hpp"
#include "pareto_tracer/problem.hpp"
#include "pareto_tracer/types.hpp"

namespace oracle {

using pareto_tracer::DenseMatrix;
using pareto_tracer::GradientSet;
using pareto_tracer::ObjectiveVec;
using pareto_tracer::Vector;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double rel_error(std::span<const double> got, std::span<const double> want) {
  Vector d(got.size());
  for (std::size_t i = 0; i < got.size(); ++i) d[i] = got[i] - want[i];
  return norm(d) / std::max(norm(want), std::numeric_limits<double>::min());
}

inline Vector gaussian(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

inline GradientSet random_gradients(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  GradientSet g(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const Vector row = gaussian(n, rng);
    std::copy(row.begin(), row.end(), g.row(i).begin());
  }
  return g;
}

inline Vector random_simplex(std::size_t m, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Vector w(m);
  double s = 0.0;
  for (double& x : w) s += x = e(rng);
  for (double& x : w) x /= s;
  return w;
}

/// A = M'M / n + I with M standard Gaussian.
inline DenseMatrix random_spd(std::size_t n, std::mt19937_64& rng) {
  const Vector m = gaussian(n * n, rng);
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += m[k * n + i] * m[k * n + j];
      a(i, j) = s / static_cast<double>(n) + (i == j ? 1.0 : 0.0);
    }
  return a;
}

inline Vector matvec(const DenseMatrix& a, std::span<const double> v) {
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
  return out;
}

/// sum_i alpha_i g_i g_i' + mu I, assembled entry by entry.
inline DenseMatrix gn_sum_matrix(const GradientSet& g, std::span<const double> alpha, double mu) {
  const std::size_t n = g.dimension();
  DenseMatrix a(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      double s = r == c ? mu : 0.0;
      for (std::size_t i = 0; i < g.objective_count(); ++i) s += alpha[i] * g.row(i)[r] * g.row(i)[c];
      a(r, c) = s;
    }
  return a;
}

/// Minimum of |sum_i l_i g_i|^2 over a regular simplex grid (m = 2 or 3).
inline double grid_min_norm_sq(const GradientSet& g, int resolution) {
  const std::size_t m = g.objective_count();
  const std::size_t n = g.dimension();
  double best = std::numeric_limits<double>::infinity();
  Vector d(n);
  auto eval = [&](const Vector& l) {
    std::fill(d.begin(), d.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) d[j] += l[i] * g.row(i)[j];
    best = std::min(best, dot(d, d));
  };
  if (m == 2) {
    for (int a = 0; a <= resolution; ++a) {
      const double t = static_cast<double>(a) / resolution;
      eval({t, 1.0 - t});
    }
  } else {
    for (int a = 0; a <= resolution; ++a)
      for (int b = 0; a + b <= resolution; ++b) {
        const double x = static_cast<double>(a) / resolution;
        const double y = static_cast<double>(b) / resolution;
        eval({x, y, 1.0 - x - y});
      }
  }
  return best;
}

inline bool dominates(const ObjectiveVec& a, const ObjectiveVec& b) {
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    strict = strict || a[i] < b[i];
  }
  return strict;
}

/// Pairwise filter with first-occurrence duplicate rule.
inline std::vector<ObjectiveVec> brute_force_filter(const std::vector<ObjectiveVec>& pts) {
  std::vector<ObjectiveVec> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < pts.size() && keep; ++j) {
      if (dominates(pts[j], pts[i])) keep = false;
      if (j < i && pts[j] == pts[i]) keep = false;
    }
    if (keep) out.push_back(pts[i]);
  }
  return out;
}

/// Fraction of uniform samples in the reference box dominated by the front, times the box area.
inline double monte_carlo_hypervolume(const std::vector<ObjectiveVec>& front, const ObjectiveVec& ref,
                                      std::size_t samples, std::uint64_t seed) {
  double lo0 = ref[0], lo1 = ref[1];
  for (const ObjectiveVec& p : front) {
    lo0 = std::min(lo0, p[0]);
    lo1 = std::min(lo1, p[1]);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u0(lo0, ref[0]), u1(lo1, ref[1]);
  std::size_t hit = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double a = u0(rng), b = u1(rng);
    for (const ObjectiveVec& p : front)
      if (p[0] <= a && p[1] <= b) {
        ++hit;
        break;
      }
  }
  return (ref[0] - lo0) * (ref[1] - lo1) * static_cast<double>(hit) / static_cast<double>(samples);
}

/// Euclidean distance from x to the segment [a, b].
inline double distance_to_segment(std::span<const double> x, std::span<const double> a, std::span<const double> b) {
  Vector ab(a.size()), ax(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab[i] = b[i] - a[i];
    ax[i] = x[i] - a[i];
  }
  const double len2 = dot(ab, ab);
  const double t = len2 > 0.0 ? std::clamp(dot(ax, ab) / len2, 0.0, 1.0) : 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ax[i] -= t * ab[i];
  return norm(ax);
}

}  // namespace oracle
