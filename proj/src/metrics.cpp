#include "pareto_tracer/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace pareto_tracer {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

bool dominated_or_duplicate(std::span<const ObjectiveVec> front, std::size_t i) {
  for (std::size_t j = 0; j < front.size(); ++j) {
    if (j == i) continue;
    if (dominates(front[j], front[i])) return true;
    if (j < i && front[j] == front[i]) return true;
  }
  return false;
}

double nearest_distance(std::span<const double> point, std::span<const ObjectiveVec> truth) {
  double best = std::numeric_limits<double>::infinity();
  for (const ObjectiveVec& t : truth) best = std::min(best, squared_distance(point, t));
  return std::sqrt(best);
}

}  // namespace

bool dominates(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dominates: objective vectors differ in length");
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

std::vector<bool> dominated_mask(std::span<const ObjectiveVec> front) {
  const auto n = static_cast<std::ptrdiff_t>(front.size());
  std::vector<char> flags(front.size(), 0);
#pragma omp parallel for schedule(dynamic, 16) if (n > 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) flags[i] = dominated_or_duplicate(front, static_cast<std::size_t>(i));
  return {flags.begin(), flags.end()};
}

std::vector<ObjectiveVec> pareto_filter(std::span<const ObjectiveVec> front) {
  const std::vector<bool> mask = dominated_mask(front);
  std::vector<ObjectiveVec> out;
  for (std::size_t i = 0; i < front.size(); ++i)
    if (!mask[i]) out.push_back(front[i]);
  return out;
}

std::vector<ParetoPoint> pareto_filter(std::span<const ParetoPoint> points) {
  const std::vector<bool> mask = dominated_mask(objectives_of(points));
  std::vector<ParetoPoint> out;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!mask[i]) out.push_back(points[i]);
  return out;
}

double hypervolume_2d(std::span<const ObjectiveVec> front, std::span<const double> reference) {
  if (reference.size() != 2) throw std::invalid_argument("hypervolume_2d: reference must have 2 entries");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(front.size());
  for (const ObjectiveVec& p : front) {
    if (p.size() != 2) throw std::invalid_argument("hypervolume_2d: points must have 2 objectives");
    if (!dominates(p, reference))
      throw std::invalid_argument(fmt::format("hypervolume_2d: point ({}, {}) does not dominate reference ({}, {})",
                                              p[0], p[1], reference[0], reference[1]));
    pts.emplace_back(p[0], p[1]);
  }
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  double ceiling = reference[1];
  for (const auto& [f1, f2] : pts) {
    if (f2 >= ceiling) continue;
    area += (reference[0] - f1) * (ceiling - f2);
    ceiling = f2;
  }
  return area;
}

double generational_distance(std::span<const ObjectiveVec> front, std::span<const ObjectiveVec> truth) {
  if (front.empty()) throw std::invalid_argument("generational_distance: empty front");
  if (truth.empty()) throw std::invalid_argument("generational_distance: empty truth");
  const auto n = static_cast<std::ptrdiff_t>(front.size());
  std::vector<double> dist(front.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) dist[i] = nearest_distance(front[i], truth);
  return std::accumulate(dist.begin(), dist.end(), 0.0) / static_cast<double>(front.size());
}

double front_spread(std::span<const ObjectiveVec> front) {
  double best = 0.0;
  for (std::size_t i = 0; i < front.size(); ++i)
    for (std::size_t j = i + 1; j < front.size(); ++j) best = std::max(best, squared_distance(front[i], front[j]));
  return std::sqrt(best);
}

ObjectiveVec shared_reference_point(const std::vector<std::span<const ObjectiveVec>>& fronts, double margin) {
  ObjectiveVec hi, lo;
  for (const auto& front : fronts) {
    for (const ObjectiveVec& p : front) {
      if (hi.empty()) {
        hi = lo = p;
        continue;
      }
      if (p.size() != hi.size()) throw std::invalid_argument("shared_reference_point: mixed objective counts");
      for (std::size_t k = 0; k < p.size(); ++k) {
        hi[k] = std::max(hi[k], p[k]);
        lo[k] = std::min(lo[k], p[k]);
      }
    }
  }
  if (hi.empty()) throw std::invalid_argument("shared_reference_point: no points");
  for (std::size_t k = 0; k < hi.size(); ++k) {
    double pad = margin * (hi[k] - lo[k]);
    if (pad <= 0.0) pad = margin * std::max(std::abs(hi[k]), 1e-12);
    hi[k] += pad;
  }
  return hi;
}

FrontMetrics compute_front_metrics(std::span<const ObjectiveVec> front, std::span<const double> reference,
                                   std::span<const ObjectiveVec> truth) {
  FrontMetrics m;
  m.point_count = front.size();
  m.reference_point.assign(reference.begin(), reference.end());
  m.hypervolume = reference.size() == 2 ? hypervolume_2d(front, reference) : 0.0;
  if (!truth.empty() && !front.empty()) m.generational_distance = generational_distance(front, truth);
  m.spread = front_spread(front);
  return m;
}

std::vector<ObjectiveVec> objectives_of(std::span<const ParetoPoint> points) {
  std::vector<ObjectiveVec> out;
  out.reserve(points.size());
  for (const ParetoPoint& p : points) out.push_back(p.f);
  return out;
}

namespace serial {

std::vector<bool> dominated_mask(std::span<const ObjectiveVec> front) {
  std::vector<bool> mask(front.size());
  for (std::size_t i = 0; i < front.size(); ++i) mask[i] = dominated_or_duplicate(front, i);
  return mask;
}

double generational_distance(std::span<const ObjectiveVec> front, std::span<const ObjectiveVec> truth) {
  if (front.empty()) throw std::invalid_argument("generational_distance: empty front");
  double sum = 0.0;
  for (const ObjectiveVec& p : front) sum += nearest_distance(p, truth);
  return sum / static_cast<double>(front.size());
}

}  // namespace serial
}  // namespace pareto_tracer
