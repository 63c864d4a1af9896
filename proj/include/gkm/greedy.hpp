#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gkm/cost.hpp"
#include "gkm/reference.hpp"
#include "gkm/selectors.hpp"

namespace gkm {

struct GreedyConfig {
  int rounds = 0;  // t
  double tau = 0.0;
  SelectorSpec selector = SelectAllSpec{};
  std::vector<Point> initial_centers;  // C_0, may be empty
  std::uint64_t seed = 0;
  int threads = 1;  // within-round candidate evaluation
  /// When set, each round records min_{c in Y_i} phi_{A*_j}({c}) per cluster
  /// so conditions can be audited after the fact. Non-owning.
  const ReferenceSolution* certify = nullptr;
};

struct RoundRecord {
  Point chosen_center;  // empty when skipped
  std::optional<double> cost_after;
  long candidate_count = 0;
  std::uint64_t selector_rng_fingerprint = 0;
  bool skipped = false;
  /// min_{c in Y_i} phi_{A*_j}({c}) per reference cluster, when certified.
  std::optional<std::vector<double>> condition_certificate;
};

struct GreedyTrace {
  std::vector<Point> initial_centers;
  std::optional<double> initial_cost;  // undefined when C_0 is empty
  std::vector<RoundRecord> rounds;
  std::vector<Point> final_centers;
  std::string selector;
  std::uint64_t seed = 0;
  std::uint64_t dataset_fingerprint = 0;

  double final_cost() const;
  /// Content hash over costs and chosen centers.
  std::uint64_t trace_fingerprint() const;
};

/// Lowest-index candidate whose cost is within (1+tau) of the exact minimum
/// over Y; the exact argmin when tau = 0. Deterministic given the order of Y
/// at any thread count. Throws on empty Y.
Point pick_candidate(const NearestCache& cache, std::span<const Point> Y, double tau,
                     int threads = 1);

/// The greedy loop: t rounds, each selecting candidates Y_i and adding a
/// (1+tau)-approximate best center. Rounds where the selector returns no
/// candidates are recorded as skipped and do not abort the run.
GreedyTrace run_greedy(const PointSpace& space, std::vector<Point> X, const GreedyConfig& config);

namespace detail {
/// Index of the picked candidate plus all evaluated costs.
struct PickResult {
  int index = -1;
  double cost = 0.0;
};
PickResult pick_candidate_indexed(const NearestCache& cache, std::span<const Point> Y, double tau,
                                  int threads);

/// Per-cluster min_{c in Y} phi_{A*_j}({c}).
std::vector<double> min_cluster_candidate_costs(const PointSpace& space,
                                                const ReferenceSolution& ref,
                                                std::span<const Point> Y, int threads);
}  // namespace detail

}  // namespace gkm
