#include "gkm/cost.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gkm {

double cost(const PointSpace& space, const std::vector<Point>& X, const std::vector<Point>& C) {
  if (C.empty()) throw std::invalid_argument("cost: empty center set");
  double total = 0.0;
  for (const Point& x : X) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& c : C) best = std::min(best, space.delta(x, c));
    total += best;
  }
  return total;
}

double normalized_cost(const PointSpace& space, const std::vector<Point>& A,
                       const std::vector<Point>& C) {
  if (A.empty()) throw std::invalid_argument("normalized_cost: empty cluster");
  double mean = cost(space, A, C) / static_cast<double>(A.size());
  double q = space.q();
  if (q == 1.0) return mean;
  return std::pow(mean, 1.0 / q);
}

Partition assign(const PointSpace& space, const std::vector<Point>& X,
                 const std::vector<Point>& C) {
  if (C.empty()) throw std::invalid_argument("assign: empty center set");
  Partition parts(C.size());
  for (int i = 0; i < static_cast<int>(X.size()); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_j = 0;
    for (int j = 0; j < static_cast<int>(C.size()); ++j) {
      double d = space.delta(X[i], C[j]);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    parts[best_j].push_back(i);
  }
  return parts;
}

NearestCache::NearestCache(const PointSpace& space,
                           std::shared_ptr<const std::vector<Point>> points,
                           std::vector<Point> centers)
    : space_(space), points_(std::move(points)), centers_(std::move(centers)) {
  const auto& X = *points_;
  nearest_dist_.assign(X.size(), std::numeric_limits<double>::infinity());
  nearest_idx_.assign(X.size(), -1);
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (int j = 0; j < static_cast<int>(centers_.size()); ++j) {
      double d = space_.delta(X[i], centers_[j]);
      if (d < nearest_dist_[i]) {
        nearest_dist_[i] = d;
        nearest_idx_[i] = j;
      }
    }
  }
  total_ = 0.0;
  if (!centers_.empty())
    for (double d : nearest_dist_) total_ += d;
}

std::optional<double> NearestCache::total_cost_opt() const {
  if (centers_.empty() && !points_->empty()) return std::nullopt;
  return total_;
}

double NearestCache::total_cost() const {
  auto t = total_cost_opt();
  if (!t) throw std::logic_error("total_cost: undefined with no centers");
  return *t;
}

double NearestCache::candidate_cost(const Point& c) const {
  const auto& X = *points_;
  double total = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i)
    total += std::min(nearest_dist_[i], space_.delta(X[i], c));
  return total;
}

NearestCache NearestCache::with_center(Point c) const {
  NearestCache out = *this;
  const auto& X = *points_;
  const int new_idx = static_cast<int>(out.centers_.size());
  out.centers_.push_back(std::move(c));
  const Point& added = out.centers_.back();
  for (std::size_t i = 0; i < X.size(); ++i) {
    double d = space_.delta(X[i], added);
    if (d < out.nearest_dist_[i]) {
      out.nearest_dist_[i] = d;
      out.nearest_idx_[i] = new_idx;
    }
  }
  // Re-summed in index order so the total matches candidate_cost bit for bit.
  out.total_ = 0.0;
  for (double d : out.nearest_dist_) out.total_ += d;
  return out;
}

int NearestCache::distinct_center_count() const {
  int count = 0;
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    bool dup = false;
    for (std::size_t j = 0; j < i && !dup; ++j) dup = centers_[i] == centers_[j];
    if (!dup) ++count;
  }
  return count;
}

NearestCache build_cache(const PointSpace& space, std::vector<Point> X, std::vector<Point> C) {
  return NearestCache(space, std::make_shared<const std::vector<Point>>(std::move(X)),
                      std::move(C));
}

Point mean_point(const std::vector<Point>& pts) {
  if (pts.empty()) throw std::invalid_argument("mean_point: empty set");
  std::vector<double> m(pts.front().coords.size(), 0.0);
  for (const Point& pt : pts)
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += pt.coords[i];
  for (double& v : m) v /= static_cast<double>(pts.size());
  return coord_point(std::move(m));
}

}  // namespace gkm
