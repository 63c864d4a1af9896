#include "gkm/selectors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "gkm/combinatorics.hpp"

namespace gkm {

std::string selector_name(const SelectorSpec& spec) {
  struct Visitor {
    std::string operator()(const SelectAllSpec&) const { return "select_all"; }
    std::string operator()(const SelectPpSpec&) const { return "select_pp"; }
    std::string operator()(const SelectUniformSpec&) const { return "select_uniform"; }
    std::string operator()(const SubsetMeansSpec&) const { return "subset_means"; }
    std::string operator()(const SelectSgdSpec&) const { return "select_sgd"; }
    std::string operator()(const SelectBallSpec&) const { return "select_ball"; }
  };
  return std::visit(Visitor{}, spec);
}

double select_pp_prescribed_count(int k, double epsilon, double q) {
  return 4.0 * k * std::pow((1.0 + epsilon) / epsilon, q + 4.0);
}

double select_sgd_prescribed_count(long n, double epsilon) {
  double s = std::ceil(1.0 / (epsilon * epsilon));
  return 2.0 * std::pow(static_cast<double>(n), 3.0 + s);
}

double select_ball_prescribed_count(long n, double epsilon, double q, int dim, double p) {
  return std::pow(static_cast<double>(n), 3.0) * std::pow(epsilon, -q * dim / p);
}

const std::vector<Point>& select_all(const std::vector<Point>& X) { return X; }

namespace {

long capped_count(double prescribed, const char* who) {
  if (prescribed <= static_cast<double>(kSampleCap)) return static_cast<long>(std::ceil(prescribed));
  std::fprintf(stderr, "[gkm] %s: prescribed sample count %.3g capped at %ld\n", who, prescribed,
               kSampleCap);
  return kSampleCap;
}

/// Categorical draw by cumulative weights; cum.back() must be positive.
int draw_categorical(const std::vector<double>& cum, RngStream& rng) {
  double u = rng.uniform() * cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  int idx = static_cast<int>(it - cum.begin());
  return std::min(idx, static_cast<int>(cum.size()) - 1);
}

}  // namespace

std::vector<Point> select_pp(const NearestCache& cache, const SelectPpSpec& spec, RngStream& rng,
                             bool* zero_cost) {
  if (zero_cost) *zero_cost = false;
  if (spec.epsilon <= 0.0) throw std::invalid_argument("select_pp: epsilon must be > 0");
  if (spec.k < 1) throw std::invalid_argument("select_pp: k must be >= 1");
  const auto& X = cache.points();
  if (X.empty()) return {};

  long m = spec.override_m
               ? *spec.override_m
               : capped_count(select_pp_prescribed_count(spec.k, spec.epsilon, cache.space().q()),
                              "select_pp");
  if (m < 1) throw std::invalid_argument("select_pp: sample count must be >= 1");

  std::vector<Point> out;
  const long n = static_cast<long>(X.size());
  if (!cache.has_centers()) {
    out.reserve(m);
    for (long i = 0; i < m; ++i) {
      RngStream s = rng.child(static_cast<std::uint64_t>(i));
      out.push_back(X[s.uniform_int(n)]);
    }
    return out;
  }
  if (cache.total_cost() <= 0.0) {
    if (zero_cost) *zero_cost = true;
    RngStream s = rng.child(std::uint64_t{0});
    out.push_back(X[s.uniform_int(n)]);
    return out;
  }

  std::vector<double> cum(X.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    acc += cache.nearest_dist(static_cast<int>(i));
    cum[i] = acc;
  }
  out.reserve(m);
  for (long i = 0; i < m; ++i) {
    RngStream s = rng.child(static_cast<std::uint64_t>(i));
    out.push_back(X[draw_categorical(cum, s)]);
  }
  return out;
}

std::vector<Point> select_uniform(const std::vector<Point>& X, const SelectUniformSpec& spec,
                                  RngStream& rng) {
  if (X.empty()) throw std::invalid_argument("select_uniform: empty dataset");
  if (spec.m < 1) throw std::invalid_argument("select_uniform: m must be >= 1");
  std::vector<Point> out;
  out.reserve(spec.m);
  const long n = static_cast<long>(X.size());
  for (long i = 0; i < spec.m; ++i) {
    RngStream s = rng.child(static_cast<std::uint64_t>(i));
    out.push_back(X[s.uniform_int(n)]);
  }
  return out;
}

std::vector<Point> subset_means(const PointSpace& space, const std::vector<Point>& X,
                                const SubsetMeansSpec& spec) {
  if (!space.is_kmeans()) throw std::invalid_argument("subset_means: requires a k-means space");
  if (X.empty()) throw std::invalid_argument("subset_means: empty dataset");
  if (spec.epsilon <= 0.0 || spec.epsilon > 1.0)
    throw std::invalid_argument("subset_means: epsilon must be in (0, 1]");

  const int m = static_cast<int>(std::ceil(1.0 / spec.epsilon));
  const int n = static_cast<int>(X.size());
  std::uint64_t count = multiset_count_capped(n, m, spec.enum_limit);
  if (count > spec.enum_limit) {
    std::ostringstream os;
    os << "subset_means: C(" << n << "+" << m << "-1, " << m << ") exceeds the enumeration limit "
       << spec.enum_limit;
    throw BudgetError(os.str());
  }

  const int d = space.dim();
  std::vector<std::vector<double>> means;
  means.reserve(count);
  for_each_multiset(n, m, [&](const std::vector<int>& idx) {
    std::vector<double> mu(d, 0.0);
    for (int i : idx)
      for (int c = 0; c < d; ++c) mu[c] += X[i].coords[c];
    for (double& v : mu) v /= m;
    means.push_back(std::move(mu));
  });
  std::sort(means.begin(), means.end());
  means.erase(std::unique(means.begin(), means.end()), means.end());

  std::vector<Point> out;
  out.reserve(means.size());
  for (auto& mu : means) out.push_back(coord_point(std::move(mu)));
  return out;
}

BallGuess guess_ball(const PointSpace& space, const std::vector<Point>& X, RngStream& rng) {
  if (X.empty()) throw std::invalid_argument("guess_ball: empty dataset");
  const int n = static_cast<int>(X.size());
  BallGuess g;
  g.y_index = static_cast<int>(rng.uniform_int(n));
  g.y = X[g.y_index];
  g.b = 1 + static_cast<int>(rng.uniform_int(n));
  g.m = 1 + static_cast<int>(rng.uniform_int(n));

  std::vector<std::pair<double, int>> by_dist(n);
  for (int i = 0; i < n; ++i) by_dist[i] = {space.delta(X[i], g.y), i};
  std::sort(by_dist.begin(), by_dist.end());  // (delta, index): lowest index on ties

  g.B.reserve(g.b);
  g.b_indices.reserve(g.b);
  g.phi_b = 0.0;
  for (int i = 0; i < g.b; ++i) {
    g.b_indices.push_back(by_dist[i].second);
    g.B.push_back(X[by_dist[i].second]);
    g.phi_b += by_dist[i].first;
  }
  g.r_estimate = g.phi_b / g.m;
  return g;
}

namespace {

void require_euclidean_median(const PointSpace& space, const char* who) {
  if (!space.is_euclidean() || space.norm() != Norm::l2 || space.p() != 1.0) {
    throw std::invalid_argument(std::string(who) + ": requires euclidean l2 with p = 1");
  }
}

}  // namespace

Point sgd_ball(const std::function<Point(RngStream&)>& sample_stream, const PointSpace& space,
               const Point& start, double radius, long steps, double step_size, RngStream& rng,
               std::vector<Point>* iterates) {
  require_euclidean_median(space, "sgd_ball");
  if (steps < 1) throw std::invalid_argument("sgd_ball: steps must be >= 1");
  if (radius < 0.0) throw std::invalid_argument("sgd_ball: radius must be >= 0");
  const int d = space.dim();
  if (static_cast<int>(start.coords.size()) != d)
    throw std::invalid_argument("sgd_ball: start dimension mismatch");

  std::vector<double> w = start.coords;
  std::vector<double> sum(d, 0.0);
  for (long it = 0; it < steps; ++it) {
    for (int c = 0; c < d; ++c) sum[c] += w[c];
    if (iterates) iterates->push_back(coord_point(w));
    Point x = sample_stream(rng);
    double nrm = 0.0;
    for (int c = 0; c < d; ++c) {
      double dcoord = w[c] - x.coords[c];
      nrm += dcoord * dcoord;
    }
    nrm = std::sqrt(nrm);
    if (nrm > 0.0) {
      // Unit subgradient of ||x - w||; the zero vector at w = x.
      for (int c = 0; c < d; ++c) w[c] -= step_size * (w[c] - x.coords[c]) / nrm;
    }
    double off = 0.0;
    for (int c = 0; c < d; ++c) {
      double dcoord = w[c] - start.coords[c];
      off += dcoord * dcoord;
    }
    off = std::sqrt(off);
    if (off > radius) {
      double shrink = radius > 0.0 ? radius / off : 0.0;
      for (int c = 0; c < d; ++c) w[c] = start.coords[c] + (w[c] - start.coords[c]) * shrink;
    }
  }
  for (int c = 0; c < d; ++c) sum[c] /= static_cast<double>(steps);
  return coord_point(std::move(sum));
}

namespace {

/// One process-wide note when a configured sample count undercuts the
/// analytic prescription.
void note_undersampling(const char* who, double prescribed, long configured) {
  static std::atomic<bool> warned{false};
  if (configured >= prescribed || warned.exchange(true)) return;
  std::fprintf(stderr, "[gkm] %s: using %ld samples; the prescribed count is %.3g\n", who,
               configured, prescribed);
}

}  // namespace

std::vector<Point> select_sgd(const PointSpace& space, const std::vector<Point>& X,
                              const SelectSgdSpec& spec, RngStream& rng) {
  require_euclidean_median(space, "select_sgd");
  if (X.empty()) throw std::invalid_argument("select_sgd: empty dataset");
  if (spec.samples < 1) throw std::invalid_argument("select_sgd: samples must be >= 1");
  if (spec.epsilon <= 0.0 || spec.epsilon >= 1.0)
    throw std::invalid_argument("select_sgd: epsilon must be in (0, 1)");

  const long n = static_cast<long>(X.size());
  note_undersampling("select_sgd", select_sgd_prescribed_count(n, spec.epsilon), spec.samples);
  const long steps = static_cast<long>(std::ceil(1.0 / (spec.epsilon * spec.epsilon)));
  auto stream = [&X, n](RngStream& s) { return X[s.uniform_int(n)]; };

  std::vector<Point> out;
  out.reserve(spec.samples);
  for (long i = 0; i < spec.samples; ++i) {
    RngStream s = rng.child(static_cast<std::uint64_t>(i));
    BallGuess g = guess_ball(space, X, s);
    double r = g.r_estimate;
    double eta = spec.step_scale * r / std::sqrt(static_cast<double>(steps));
    RngStream sgd_rng = s.child("sgd");
    out.push_back(sgd_ball(stream, space, g.y, r, steps, eta, sgd_rng));
  }
  return out;
}

std::vector<Point> select_ball(const PointSpace& space, const std::vector<Point>& X,
                               const SelectBallSpec& spec, RngStream& rng) {
  if (!space.is_euclidean()) throw std::invalid_argument("select_ball: euclidean spaces only");
  if (X.empty()) throw std::invalid_argument("select_ball: empty dataset");
  if (spec.samples < 1) throw std::invalid_argument("select_ball: samples must be >= 1");
  if (spec.epsilon <= 0.0 || spec.epsilon >= 1.0)
    throw std::invalid_argument("select_ball: epsilon must be in (0, 1)");
  note_undersampling("select_ball",
                     select_ball_prescribed_count(static_cast<long>(X.size()), spec.epsilon,
                                                  space.q(), space.dim(), space.p()),
                     spec.samples);

  std::vector<Point> out;
  out.reserve(spec.samples);
  for (long i = 0; i < spec.samples; ++i) {
    RngStream s = rng.child(static_cast<std::uint64_t>(i));
    BallGuess g = guess_ball(space, X, s);
    double radius = 2.0 * std::pow(g.r_estimate, 1.0 / space.p());
    RngStream ball_rng = s.child("ball");
    out.push_back(norm_ball_sample(space, g.y, radius, ball_rng));
  }
  return out;
}

SeedTrace kmeanspp_seed_trace(const PointSpace& space, const std::vector<Point>& X, int t,
                              RngStream& rng) {
  if (X.empty()) throw std::invalid_argument("kmeanspp_seed: empty dataset");
  if (t < 1) throw std::invalid_argument("kmeanspp_seed: t must be >= 1");

  SeedTrace trace;
  NearestCache cache = build_cache(space, X, {});
  const long n = static_cast<long>(X.size());
  std::vector<double> cum(X.size());
  for (int step = 0; step < t; ++step) {
    RngStream s = rng.child(static_cast<std::uint64_t>(step));
    int idx;
    if (!cache.has_centers() || cache.total_cost() <= 0.0) {
      idx = static_cast<int>(s.uniform_int(n));
    } else {
      double acc = 0.0;
      for (std::size_t i = 0; i < X.size(); ++i) {
        acc += cache.nearest_dist(static_cast<int>(i));
        cum[i] = acc;
      }
      idx = draw_categorical(cum, s);
    }
    cache = cache.with_center(X[idx]);
    trace.centers.push_back(X[idx]);
    trace.costs.push_back(cache.total_cost());
  }
  return trace;
}

std::vector<Point> kmeanspp_seed(const PointSpace& space, const std::vector<Point>& X, int t,
                                 RngStream& rng) {
  return kmeanspp_seed_trace(space, X, t, rng).centers;
}

CandidateSource::CandidateSource(PointSpace space, SelectorSpec spec)
    : space_(std::move(space)), spec_(std::move(spec)), name_(selector_name(spec_)) {}

std::span<const Point> CandidateSource::round_candidates(const NearestCache& cache,
                                                         RngStream& rng) {
  zero_cost_ = false;
  if (std::holds_alternative<SelectAllSpec>(spec_)) return {cache.points()};
  if (const auto* pp = std::get_if<SelectPpSpec>(&spec_)) {
    scratch_ = select_pp(cache, *pp, rng, &zero_cost_);
    return {scratch_};
  }
  if (const auto* u = std::get_if<SelectUniformSpec>(&spec_)) {
    scratch_ = select_uniform(cache.points(), *u, rng);
    return {scratch_};
  }
  if (const auto* sm = std::get_if<SubsetMeansSpec>(&spec_)) {
    if (!memo_) memo_ = subset_means(space_, cache.points(), *sm);
    return {*memo_};
  }
  if (const auto* sg = std::get_if<SelectSgdSpec>(&spec_)) {
    scratch_ = select_sgd(space_, cache.points(), *sg, rng);
    return {scratch_};
  }
  const auto& ball = std::get<SelectBallSpec>(spec_);
  scratch_ = select_ball(space_, cache.points(), ball, rng);
  return {scratch_};
}

}  // namespace gkm
