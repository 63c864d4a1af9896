#pragma once

#include <memory>
#include <vector>

#include "gkm/cost.hpp"
#include "gkm/point_space.hpp"

namespace gkm {

/// A fixed k-center solution C* = {c*_1..c*_k} with its induced partition
/// A*_1..A*_k. Not assumed optimal; every diagnostic is relative to it.
struct ReferenceSolution {
  std::shared_ptr<const std::vector<Point>> points;  // the dataset X
  std::vector<Point> centers;
  Partition partition;  // assign(X, centers)
  double cost = 0.0;    // phi_X(C*)

  int k() const { return static_cast<int>(centers.size()); }
  const std::vector<Point>& X() const { return *points; }

  /// Materializes cluster j's points.
  std::vector<Point> cluster(int j) const;

  /// phi_{A*_j}({c*_j}).
  double cluster_cost(const PointSpace& space, int j) const;
};

/// Builds the reference from centers: partition = assign(X, centers),
/// cost = phi_X(centers). With means_required (k-means only), verifies
/// c*_j = mu(A*_j) to 1e-9 relative and throws otherwise.
ReferenceSolution make_reference(const PointSpace& space,
                                 std::shared_ptr<const std::vector<Point>> points,
                                 std::vector<Point> centers, bool means_required = false);

ReferenceSolution make_reference(const PointSpace& space, const std::vector<Point>& X,
                                 std::vector<Point> centers, bool means_required = false);

}  // namespace gkm
