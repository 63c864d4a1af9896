#include "gkm/greedy.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gkm/parallel.hpp"

namespace gkm {

double GreedyTrace::final_cost() const {
  for (auto it = rounds.rbegin(); it != rounds.rend(); ++it)
    if (it->cost_after) return *it->cost_after;
  if (initial_cost) return *initial_cost;
  return std::numeric_limits<double>::infinity();
}

std::uint64_t GreedyTrace::trace_fingerprint() const {
  std::uint64_t h = hash_combine(dataset_fingerprint, seed);
  h = hash_combine(h, fnv1a(selector));
  h = hash_combine(h, fingerprint(initial_centers));
  for (const RoundRecord& r : rounds) {
    h = hash_combine(h, r.skipped ? 1u : 0u);
    double c = r.cost_after ? *r.cost_after : std::numeric_limits<double>::quiet_NaN();
    h = hash_combine(h, std::bit_cast<std::uint64_t>(c));
    h = hash_combine(h, static_cast<std::uint64_t>(r.candidate_count));
    if (!r.skipped) h = hash_combine(h, fingerprint({r.chosen_center}));
  }
  return h;
}

namespace detail {

PickResult pick_candidate_indexed(const NearestCache& cache, std::span<const Point> Y, double tau,
                                  int threads) {
  if (Y.empty()) throw std::invalid_argument("pick_candidate: empty candidate set");
  if (tau < 0.0) throw std::invalid_argument("pick_candidate: tau must be >= 0");

  std::vector<double> costs(Y.size());
  parallel_chunks(static_cast<long>(Y.size()), threads, [&](int, long lo, long hi) {
    for (long i = lo; i < hi; ++i) costs[i] = cache.candidate_cost(Y[i]);
  });

  double best = costs[0];
  for (double c : costs) best = std::min(best, c);
  double threshold = (1.0 + tau) * best;
  for (std::size_t i = 0; i < costs.size(); ++i)
    if (costs[i] <= threshold) return {static_cast<int>(i), costs[i]};
  return {0, costs[0]};  // unreachable: the argmin satisfies the threshold
}

std::vector<double> min_cluster_candidate_costs(const PointSpace& space,
                                                const ReferenceSolution& ref,
                                                std::span<const Point> Y, int threads) {
  const auto& X = ref.X();
  const int k = ref.k();
  const long n_cand = static_cast<long>(Y.size());
  std::vector<std::vector<double>> partial(
      parallel_chunk_count(n_cand, threads),
      std::vector<double>(k, std::numeric_limits<double>::infinity()));

  parallel_chunks(n_cand, threads, [&](int w, long lo, long hi) {
    auto& mins = partial[w];
    for (long ci = lo; ci < hi; ++ci) {
      for (int j = 0; j < k; ++j) {
        double phi = 0.0;
        for (int pi : ref.partition[j]) phi += space.delta(X[pi], Y[ci]);
        mins[j] = std::min(mins[j], phi);
      }
    }
  });

  std::vector<double> out(k, std::numeric_limits<double>::infinity());
  for (const auto& mins : partial)
    for (int j = 0; j < k; ++j) out[j] = std::min(out[j], mins[j]);
  return out;
}

}  // namespace detail

Point pick_candidate(const NearestCache& cache, std::span<const Point> Y, double tau,
                     int threads) {
  return Y[detail::pick_candidate_indexed(cache, Y, tau, threads).index];
}

GreedyTrace run_greedy(const PointSpace& space, std::vector<Point> X, const GreedyConfig& config) {
  if (X.empty()) throw std::invalid_argument("run_greedy: empty dataset");
  if (config.rounds < 0) throw std::invalid_argument("run_greedy: rounds must be >= 0");

  auto points = std::make_shared<const std::vector<Point>>(std::move(X));
  NearestCache cache(space, points, config.initial_centers);
  CandidateSource source(space, config.selector);
  RngStream root = RngStream(config.seed).child("round");

  GreedyTrace trace;
  trace.initial_centers = config.initial_centers;
  trace.initial_cost = cache.total_cost_opt();
  trace.final_centers = config.initial_centers;
  trace.selector = source.name();
  trace.seed = config.seed;
  trace.dataset_fingerprint = fingerprint(*points);

  for (int i = 1; i <= config.rounds; ++i) {
    RngStream round_rng = root.child(static_cast<std::uint64_t>(i));
    RoundRecord rec;
    rec.selector_rng_fingerprint = round_rng.key();

    std::span<const Point> Y;
    try {
      Y = source.round_candidates(cache, round_rng);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "selector failed at round " << i << ": " << e.what();
      throw std::runtime_error(os.str());
    }
    rec.candidate_count = static_cast<long>(Y.size());

    if (Y.empty()) {
      rec.skipped = true;
      rec.cost_after = cache.total_cost_opt();
      trace.rounds.push_back(std::move(rec));
      continue;
    }

    if (config.certify)
      rec.condition_certificate =
          detail::min_cluster_candidate_costs(space, *config.certify, Y, config.threads);

    auto pick = detail::pick_candidate_indexed(cache, Y, config.tau, config.threads);
    cache = cache.with_center(Y[pick.index]);
    rec.chosen_center = Y[pick.index];
    rec.cost_after = cache.total_cost();
    trace.rounds.push_back(std::move(rec));
  }
  trace.final_centers = cache.centers();
  return trace;
}

}  // namespace gkm
