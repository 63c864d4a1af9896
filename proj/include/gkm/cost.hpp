#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "gkm/point_space.hpp"

namespace gkm {

/// Center-indexed lists of point indices; parts may be empty.
using Partition = std::vector<std::vector<int>>;

/// Clustering cost phi_X(C) = sum_x min_{c in C} Delta(x, c).
/// Throws on empty C; returns 0 for empty X.
double cost(const PointSpace& space, const std::vector<Point>& X, const std::vector<Point>& C);

/// Normalized cost psi_A(C) = (phi_A(C) / |A|)^(1/q). Throws on empty A or C.
double normalized_cost(const PointSpace& space, const std::vector<Point>& A,
                       const std::vector<Point>& C);

/// Assigns every point to its nearest center, lowest center index on ties.
Partition assign(const PointSpace& space, const std::vector<Point>& X,
                 const std::vector<Point>& C);

/// Per-point nearest-center state for O(n) candidate evaluation.
///
/// Immutable after construction: candidate_cost is read-only and safe to call
/// concurrently; with_center returns a new cache (copy-on-write of the
/// distance arrays, shared point snapshot). An empty center set is
/// representable: nearest distances hold an infinity sentinel and the total
/// is undefined.
class NearestCache {
 public:
  NearestCache(const PointSpace& space, std::shared_ptr<const std::vector<Point>> points,
               std::vector<Point> centers);

  const PointSpace& space() const { return space_; }
  const std::vector<Point>& points() const { return *points_; }
  std::shared_ptr<const std::vector<Point>> points_ptr() const { return points_; }
  const std::vector<Point>& centers() const { return centers_; }
  bool has_centers() const { return !centers_.empty(); }

  /// min_{c in C} Delta(points()[i], c); +inf sentinel when C is empty.
  double nearest_dist(int i) const { return nearest_dist_[i]; }
  /// Index into centers() achieving the min (lowest on ties); -1 when C empty.
  int nearest_index(int i) const { return nearest_idx_[i]; }
  const std::vector<double>& nearest_dists() const { return nearest_dist_; }

  /// Undefined (nullopt) when C is empty and X is not.
  std::optional<double> total_cost_opt() const;
  /// Throws when undefined.
  double total_cost() const;

  /// phi_X(C union {c}) without mutating the cache.
  double candidate_cost(const Point& c) const;

  /// New cache for C union {c}; appends without deduplication.
  NearestCache with_center(Point c) const;

  /// Centers counted up to exact duplicates.
  int distinct_center_count() const;

 private:
  PointSpace space_;
  std::shared_ptr<const std::vector<Point>> points_;
  std::vector<Point> centers_;
  std::vector<double> nearest_dist_;
  std::vector<int> nearest_idx_;
  double total_ = 0.0;
};

/// Spec-shaped constructor wrapper.
NearestCache build_cache(const PointSpace& space, std::vector<Point> X, std::vector<Point> C);

/// Mean of a nonempty set of euclidean points.
Point mean_point(const std::vector<Point>& pts);

}  // namespace gkm
