#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pareto_tracer/types.hpp"

namespace pareto_tracer {

/// a dominates b: a_i <= b_i for all i with at least one strict inequality.
bool dominates(std::span<const double> a, std::span<const double> b);

/// mask[i] is true when front[i] is dominated by another entry or duplicates an earlier one.
std::vector<bool> dominated_mask(std::span<const ObjectiveVec> front);

/// Non-dominated subset in input order; objective-space duplicates keep the first occurrence.
std::vector<ParetoPoint> pareto_filter(std::span<const ParetoPoint> points);
std::vector<ObjectiveVec> pareto_filter(std::span<const ObjectiveVec> front);

/// Area dominated by a bi-objective front and bounded by `reference`.
/// Every point must dominate the reference point.
double hypervolume_2d(std::span<const ObjectiveVec> front, std::span<const double> reference);

/// Mean over front points of the Euclidean distance to the nearest truth point.
double generational_distance(std::span<const ObjectiveVec> front, std::span<const ObjectiveVec> truth);

/// Largest pairwise Euclidean distance between front points (front extent).
double front_spread(std::span<const ObjectiveVec> front);

/// Componentwise max over all fronts plus `margin` times the componentwise range.
ObjectiveVec shared_reference_point(const std::vector<std::span<const ObjectiveVec>>& fronts,
                                    double margin = 0.1);

struct FrontMetrics {
  double hypervolume = 0.0;
  std::optional<double> generational_distance;
  double spread = 0.0;
  std::size_t point_count = 0;
  ObjectiveVec reference_point;
};

FrontMetrics compute_front_metrics(std::span<const ObjectiveVec> front, std::span<const double> reference,
                                   std::span<const ObjectiveVec> truth = {});

std::vector<ObjectiveVec> objectives_of(std::span<const ParetoPoint> points);

namespace serial {

std::vector<bool> dominated_mask(std::span<const ObjectiveVec> front);
double generational_distance(std::span<const ObjectiveVec> front, std::span<const ObjectiveVec> truth);

}  // namespace serial

}  // namespace pareto_tracer
