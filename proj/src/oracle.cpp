#include "gkm/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gkm/combinatorics.hpp"

namespace gkm {

MedoidResult brute_force_medoids(const PointSpace& space, const std::vector<Point>& X, int k) {
  const int n = static_cast<int>(X.size());
  if (n == 0) throw std::invalid_argument("brute_force_medoids: empty dataset");
  if (n > 16) throw BudgetError("brute_force_medoids: |X| must be <= 16");
  if (k < 1 || k > n) throw std::invalid_argument("brute_force_medoids: need 1 <= k <= |X|");

  // All pairwise deltas once; subsets then cost O(n*k) each.
  std::vector<double> d(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d[static_cast<std::size_t>(i) * n + j] = space.delta(X[i], X[j]);

  MedoidResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for_each_combination(n, k, [&](const std::vector<int>& subset) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double nd = std::numeric_limits<double>::infinity();
      for (int c : subset) nd = std::min(nd, d[static_cast<std::size_t>(i) * n + c]);
      total += nd;
    }
    if (total < best.cost) {
      best.cost = total;
      best.indices = subset;
    }
  });
  best.centers.reserve(k);
  for (int i : best.indices) best.centers.push_back(X[i]);
  return best;
}

KmeansResult brute_force_kmeans(const PointSpace& space, const std::vector<Point>& X, int k) {
  if (!space.is_kmeans())
    throw std::invalid_argument("brute_force_kmeans: requires a k-means space");
  const int n = static_cast<int>(X.size());
  if (n == 0) throw std::invalid_argument("brute_force_kmeans: empty dataset");
  if (n > 10) throw BudgetError("brute_force_kmeans: |X| must be <= 10");
  if (k < 1) throw std::invalid_argument("brute_force_kmeans: k must be >= 1");

  const int d = space.dim();
  KmeansResult best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> sums;
  std::vector<int> counts;

  for_each_set_partition(n, k, [&](const std::vector<int>& rgs, int parts) {
    sums.assign(parts, std::vector<double>(d, 0.0));
    counts.assign(parts, 0);
    for (int i = 0; i < n; ++i) {
      ++counts[rgs[i]];
      for (int c = 0; c < d; ++c) sums[rgs[i]][c] += X[i].coords[c];
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < d; ++c) {
        double diff = X[i].coords[c] - sums[rgs[i]][c] / counts[rgs[i]];
        total += diff * diff;
      }
    }
    if (total < best.cost) {
      best.cost = total;
      best.partition.assign(parts, {});
      for (int i = 0; i < n; ++i) best.partition[rgs[i]].push_back(i);
    }
  });

  best.means.reserve(best.partition.size());
  for (const auto& part : best.partition) {
    std::vector<Point> pts;
    pts.reserve(part.size());
    for (int i : part) pts.push_back(X[i]);
    best.means.push_back(mean_point(pts));
  }
  return best;
}

InabaResult inaba_search(const PointSpace& space, const std::vector<Point>& A, double epsilon) {
  if (!space.is_kmeans()) throw std::invalid_argument("inaba_search: requires a k-means space");
  if (A.empty()) throw std::invalid_argument("inaba_search: empty set");
  if (epsilon <= 0.0) throw std::invalid_argument("inaba_search: epsilon must be > 0");

  const int n = static_cast<int>(A.size());
  const int m = static_cast<int>(std::ceil(1.0 / epsilon));
  if (multiset_count_capped(n, m, 1000000) > 1000000)
    throw BudgetError("inaba_search: multiset enumeration exceeds 10^6");

  const int d = space.dim();
  Point mu = mean_point(A);
  double mu_cost = cost(space, A, {mu});

  InabaResult best;
  best.ratio = std::numeric_limits<double>::infinity();
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<double> mean(d);
  for_each_multiset(n, m, [&](const std::vector<int>& idx) {
    std::fill(mean.begin(), mean.end(), 0.0);
    for (int i : idx)
      for (int c = 0; c < d; ++c) mean[c] += A[i].coords[c];
    for (double& v : mean) v /= m;
    double total = 0.0;
    for (const Point& x : A)
      for (int c = 0; c < d; ++c) {
        double diff = x.coords[c] - mean[c];
        total += diff * diff;
      }
    if (total < best_cost) {
      best_cost = total;
      best.best_mean = coord_point(mean);
    }
  });
  best.ratio = mu_cost > 0.0 ? best_cost / mu_cost : 1.0;
  return best;
}

}  // namespace gkm
