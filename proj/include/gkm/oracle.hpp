#pragma once

#include <vector>

#include "gkm/cost.hpp"
#include "gkm/point_space.hpp"
#include "gkm/selectors.hpp"  // BudgetError

namespace gkm {

struct MedoidResult {
  std::vector<Point> centers;
  std::vector<int> indices;  // into X, ascending
  double cost = 0.0;
};

/// Exact minimum of phi_X(C) over all size-k subsets of X, ties broken by
/// the lexicographically smallest index subset. Hard limit |X| <= 16.
MedoidResult brute_force_medoids(const PointSpace& space, const std::vector<Point>& X, int k);

struct KmeansResult {
  Partition partition;
  std::vector<Point> means;
  double cost = 0.0;
};

/// Exact minimum over all partitions of X into at most k nonempty parts of
/// the within-part squared deviation around part means. k-means spaces only;
/// hard limit |X| <= 10. Ties: first partition in restricted-growth-string
/// enumeration order.
KmeansResult brute_force_kmeans(const PointSpace& space, const std::vector<Point>& X, int k);

struct InabaResult {
  Point best_mean;
  double ratio = 1.0;  // phi_A({best_mean}) / phi_A({mu(A)}); 1 when phi_A({mu}) = 0
};

/// Searches all size-ceil(1/eps) multisets of A for the mean minimizing
/// phi_A; the ratio against the full mean is at most 1 + eps.
/// Hard limit C(|A|+m-1, m) <= 10^6.
InabaResult inaba_search(const PointSpace& space, const std::vector<Point>& A, double epsilon);

}  // namespace gkm
