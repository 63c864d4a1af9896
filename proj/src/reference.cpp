#include "gkm/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace gkm {

std::vector<Point> ReferenceSolution::cluster(int j) const {
  std::vector<Point> out;
  out.reserve(partition[j].size());
  for (int i : partition[j]) out.push_back((*points)[i]);
  return out;
}

double ReferenceSolution::cluster_cost(const PointSpace& space, int j) const {
  double total = 0.0;
  for (int i : partition[j]) total += space.delta((*points)[i], centers[j]);
  return total;
}

ReferenceSolution make_reference(const PointSpace& space,
                                 std::shared_ptr<const std::vector<Point>> points,
                                 std::vector<Point> centers, bool means_required) {
  if (centers.empty()) throw std::invalid_argument("make_reference: empty center set");
  ReferenceSolution ref;
  ref.points = std::move(points);
  ref.centers = std::move(centers);
  ref.partition = assign(space, *ref.points, ref.centers);
  ref.cost = cost(space, *ref.points, ref.centers);

  if (means_required) {
    if (!space.is_kmeans())
      throw std::invalid_argument("make_reference: means_required needs a k-means space");
    for (int j = 0; j < ref.k(); ++j) {
      if (ref.partition[j].empty()) continue;
      Point mu = mean_point(ref.cluster(j));
      double scale = 0.0;
      for (double c : mu.coords) scale = std::max(scale, std::abs(c));
      for (std::size_t i = 0; i < mu.coords.size(); ++i)
        if (std::abs(mu.coords[i] - ref.centers[j].coords[i]) > 1e-9 * std::max(scale, 1.0))
          throw std::invalid_argument("make_reference: center is not its cluster mean");
    }
  }
  return ref;
}

ReferenceSolution make_reference(const PointSpace& space, const std::vector<Point>& X,
                                 std::vector<Point> centers, bool means_required) {
  return make_reference(space, std::make_shared<const std::vector<Point>>(X),
                        std::move(centers), means_required);
}

}  // namespace gkm
