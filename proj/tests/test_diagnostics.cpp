#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gkm/dataset.hpp"
#include "gkm/diagnostics.hpp"
#include "gkm/experiment.hpp"
#include "gkm/selectors.hpp"
#include "test_util.hpp"

using namespace gkm;
using namespace gkm::testutil;

namespace {
const PointSpace km1 = PointSpace::kmeans(1);
const PointSpace km2 = PointSpace::kmeans(2);

ReferenceSolution single_cluster_ref() {
  // A = {0, 1, 4}, c* = 5/3: psi ratios are {25/26, 2/13, 49/26}.
  return make_reference(km1, pts1d({0, 1, 4}), pts1d({5.0 / 3.0}));
}
}  // namespace

TEST_CASE("kappa_lb: finite metrics with data centers give zero") {
  auto fm = random_finite_metric(*std::make_unique<RngStream>(3), 8, 1.0);
  auto X = metric_points(fm);
  ReferenceSolution ref = make_reference(fm, X, {index_point(2), index_point(5)});
  CHECK(kappa_lb(fm, ref) == 0.0);
}

TEST_CASE("kappa_lb: worked single-cluster value") {
  ReferenceSolution ref = single_cluster_ref();
  CHECK(kappa_lb(km1, ref) == doctest::Approx(2.0 / 13.0).epsilon(1e-12));
}

TEST_CASE("kappa_lb: zero-cost clusters contribute zero") {
  auto X = pts1d({2, 2, 2});
  ReferenceSolution ref = make_reference(km1, X, pts1d({2}));
  CHECK(kappa_lb(km1, ref) == 0.0);

  ReferenceSolution degenerate;
  degenerate.points = std::make_shared<const std::vector<Point>>();
  degenerate.centers = pts1d({0});
  degenerate.partition = {{}};
  CHECK_THROWS_AS(kappa_lb(km1, degenerate), std::invalid_argument);
}

TEST_CASE("core_set: thresholds and the worked example") {
  auto A = pts1d({0, 1, 4});
  Point c = coord_point({5.0 / 3.0});

  CHECK(core_set(km1, A, c, 100.0).size() == 3);
  CHECK(core_set(km1, A, c, 0.0).empty());

  auto mid = core_set(km1, A, c, 0.5);
  REQUIRE(mid.size() == 1);
  CHECK(mid[0] == coord_point({1}));

  // Monotone in kappa.
  RngStream rng(17);
  auto B = random_points(rng, 10, 2);
  Point cb = mean_point(B);
  std::size_t prev = 0;
  for (double kappa : {0.0, 0.3, 0.7, 1.0, 1.5, 10.0}) {
    std::size_t cur = core_set(km2, B, cb, kappa).size();
    CHECK(cur >= prev);
    prev = cur;
  }

  // Zero-cost cluster: only zero-distance points qualify at any kappa.
  auto same = pts1d({3, 3});
  CHECK(core_set(km1, same, coord_point({3}), 0.0).size() == 2);
  CHECK_THROWS_AS(core_set(km1, {}, c, 1.0), std::invalid_argument);
}

TEST_CASE("kappa_core: worked example and single-point clusters") {
  ReferenceSolution ref = single_cluster_ref();
  CHECK(kappa_core(km1, ref, 1.0) == doctest::Approx(25.0 / 26.0).epsilon(1e-12));

  // Singleton clusters with centers at the points: kappa_core = 0.
  auto fm = PointSpace::finite_metric(2, {0, 3, 3, 0}, 1.0);
  auto X = metric_points(fm);
  ReferenceSolution singles = make_reference(fm, X, {index_point(0), index_point(1)});
  CHECK(kappa_core(fm, singles, 0.5) == 0.0);
}

TEST_CASE("kappa bounds: kappa_lb <= kappa_core <= (1+eps)^(1/q)") {
  RngStream rng(808);
  for (int trial = 0; trial < 40; ++trial) {
    RngStream t = rng.child(trial);
    PointSpace space = trial % 3 == 0   ? random_finite_metric(t, 10, 2.0)
                       : trial % 3 == 1 ? PointSpace::euclidean(2, Norm::l1, 3.0)
                                        : km2;
    auto X = space.is_euclidean() ? random_points(t, 12, 2) : metric_points(space);
    int k = 1 + static_cast<int>(t.uniform_int(3));
    ReferenceSolution ref = make_consistent_reference(space, X, k, t);
    double eps = t.uniform(0.2, 2.0);
    double lb = kappa_lb(space, ref);
    double core = kappa_core(space, ref, eps);
    CHECK(lb <= core * (1.0 + 1e-9) + 1e-12);
    CHECK(core <= std::pow(1.0 + eps, 1.0 / space.q()) * (1.0 + 1e-9));
  }
}

TEST_CASE("triangle power bound: worked cases and k-means equality") {
  CHECK(check_triangle_power(km1, pts1d({0, 2}), coord_point({1}), coord_point({1})));

  auto med1 = PointSpace::euclidean(1, Norm::l2, 1.0);
  auto A = pts1d({0, 2});
  CHECK(check_triangle_power(med1, A, coord_point({1}), coord_point({4})));
  CHECK(normalized_cost(med1, A, {coord_point({4})}) == doctest::Approx(3.0));

  // k-means with c* = mu(A): the bound is the bias-variance equality.
  RngStream rng(5150);
  for (int trial = 0; trial < 30; ++trial) {
    RngStream t = rng.child(trial);
    auto B = random_points(t, 8, 2);
    Point mu = mean_point(B);
    Point y = random_points(t, 1, 2)[0];
    double lhs = normalized_cost(km2, B, {y});
    double rhs = normalized_cost(km2, B, {mu}) + normalized_cost(km2, {y}, {mu});
    CHECK(approx_eq(lhs, rhs, 1e-9));
    CHECK(check_triangle_power(km2, B, mu, y));
  }
}

TEST_CASE("fact Cp corollary: best data point is (1+kappa_lb)-good per cluster") {
  RngStream rng(31337);
  for (int trial = 0; trial < 30; ++trial) {
    RngStream t = rng.child(trial);
    PointSpace space = trial % 2 ? PointSpace::euclidean(2, Norm::linf, 2.0) : km2;
    auto X = random_points(t, 14, 2);
    ReferenceSolution ref = make_consistent_reference(space, X, 2, t);
    double lb = kappa_lb(space, ref);
    for (int j = 0; j < ref.k(); ++j) {
      if (ref.partition[j].empty()) continue;
      auto A = ref.cluster(j);
      double target = normalized_cost(space, A, {ref.centers[j]});
      double best = std::numeric_limits<double>::infinity();
      for (const Point& y : A) best = std::min(best, normalized_cost(space, A, {y}));
      CHECK(approx_le(best, (1.0 + lb) * target));
      CHECK(approx_le(best, 2.0 * target));
    }
  }
}

TEST_CASE("core membership: adding a core point caps the cluster cost") {
  RngStream rng(9090);
  for (int trial = 0; trial < 30; ++trial) {
    RngStream t = rng.child(trial);
    PointSpace space = trial % 2 ? PointSpace::euclidean(2, Norm::l1, 1.0) : km2;
    auto X = random_points(t, 16, 2);
    ReferenceSolution ref = make_consistent_reference(space, X, 2, t);
    double eps = t.uniform(0.3, 1.5);
    double kc = kappa_core(space, ref, eps);
    std::vector<Point> C;
    for (int i = 0; i < 2; ++i) C.push_back(X[t.uniform_int(16)]);

    for (int j = 0; j < ref.k(); ++j) {
      if (ref.partition[j].empty()) continue;
      auto A = ref.cluster(j);
      double target = normalized_cost(space, A, {ref.centers[j]});
      for (const Point& y : core_set(space, A, ref.centers[j], kc)) {
        std::vector<Point> grown = C;
        grown.push_back(y);
        CHECK(normalized_cost(space, A, grown) <= (1.0 + kc) * target + 1e-9 * (1.0 + target));
      }
    }
  }
}

TEST_CASE("condition 1: direct cases") {
  RngStream rng(246);
  auto X = random_points(rng, 12, 2);
  ReferenceSolution ref = make_consistent_reference(km2, X, 2, rng);

  CHECK(check_condition1(km2, ref, ref.centers, 1.0));
  CHECK_FALSE(check_condition1(km2, ref, {coord_point({1e6, 1e6})}, 1.0));

  double gamma = std::pow(1.0 + kappa_lb(km2, ref), km2.q());
  CHECK(check_condition1(km2, ref, X, gamma));
}

TEST_CASE("condition 2: implication and brute-force cross-check") {
  RngStream rng(135);
  for (int trial = 0; trial < 40; ++trial) {
    RngStream t = rng.child(trial);
    auto X = random_points(t, 8, 2);
    ReferenceSolution ref = make_consistent_reference(km2, X, 2, t);
    std::vector<Point> C_prev, Y;
    for (int i = 0; i < 2; ++i) C_prev.push_back(X[t.uniform_int(8)]);
    for (int i = 0; i < 3; ++i) Y.push_back(random_points(t, 1, 2)[0]);
    double gamma = t.uniform(1.0, 2.0);

    if (check_condition1(km2, ref, Y, gamma)) CHECK(check_condition2(km2, ref, C_prev, Y, gamma));

    // Independent evaluation of both maxima with plain loops.
    double lhs = 0.0, rhs = 0.0;
    for (int j = 0; j < ref.k(); ++j) {
      auto A = ref.cluster(j);
      if (A.empty()) continue;
      double prev = cost(km2, A, C_prev);
      double min_y = std::numeric_limits<double>::infinity();
      for (const Point& c : Y) min_y = std::min(min_y, cost(km2, A, {c}));
      lhs = std::max(lhs, std::max(0.0, prev - min_y));
      rhs = std::max(rhs, std::max(0.0, prev - gamma * cost(km2, A, {ref.centers[j]})));
    }
    CHECK(check_condition2(km2, ref, C_prev, Y, gamma) == approx_le(rhs, lhs));
  }

  // gamma-good current centers make the right side vanish.
  auto X = random_points(rng, 10, 2);
  ReferenceSolution ref = make_consistent_reference(km2, X, 2, rng);
  CHECK(check_condition2(km2, ref, ref.centers, {coord_point({1e9, 1e9})}, 1.0));
}

TEST_CASE("audit_run: select_all traces certify condition 1 every round") {
  RngStream rng(2718);
  auto X = random_points(rng, 20, 2);
  ReferenceSolution ref = make_consistent_reference(km2, X, 3, rng);

  GreedyConfig cfg;
  cfg.rounds = 5;
  cfg.initial_centers = {X[0]};
  GreedyTrace trace = run_greedy(km2, X, cfg);

  AuditOptions opts;
  opts.gamma = std::pow(1.0 + kappa_lb(km2, ref), km2.q());
  RecurrenceReport report = audit_run(km2, X, ref, trace, opts);
  REQUIRE(report.rounds.size() == 5);
  for (const auto& r : report.rounds) {
    CHECK(r.condition1);
    CHECK(r.condition2);
    CHECK(r.recurrence_ok);
  }
  CHECK(report.rho_empirical == 1.0);
  CHECK(report.implication_ok);
  CHECK(report.tau_ok);
}

TEST_CASE("audit_run: t = 0 reports the initial ratio") {
  RngStream rng(42);
  auto X = random_points(rng, 10, 2);
  ReferenceSolution ref = make_consistent_reference(km2, X, 2, rng);
  GreedyConfig cfg;
  cfg.rounds = 0;
  cfg.initial_centers = {X[1]};
  GreedyTrace trace = run_greedy(km2, X, cfg);

  RecurrenceReport report = audit_run(km2, X, ref, trace, AuditOptions{});
  CHECK(report.rounds.empty());
  CHECK(report.final_ratio == doctest::Approx(cost(km2, X, {X[1]}) / ref.cost));
  CHECK(report.alpha_measured == doctest::Approx(report.final_ratio));
}

TEST_CASE("audit_run: certified sampled traces audit without select_all") {
  RngStream rng(11235);
  auto X = random_points(rng, 18, 2);
  ReferenceSolution ref = make_consistent_reference(km2, X, 2, rng);

  GreedyConfig cfg;
  cfg.rounds = 4;
  cfg.selector = SelectPpSpec{1.0, 2, 12};
  cfg.initial_centers = {X[0]};
  cfg.seed = 99;
  cfg.certify = &ref;
  GreedyTrace trace = run_greedy(km2, X, cfg);

  RecurrenceReport report = audit_run(km2, X, ref, trace, AuditOptions{1.5, 0.0, 0.1, {}});
  CHECK(report.implication_ok);
  CHECK(report.rounds.size() == 4);

  GreedyConfig bare = cfg;
  bare.certify = nullptr;
  GreedyTrace no_cert = run_greedy(km2, X, bare);
  CHECK_THROWS_AS(audit_run(km2, X, ref, no_cert, AuditOptions{}), std::invalid_argument);
}

TEST_CASE("audit_run: skipped rounds are neutral and survive serialization") {
  RngStream rng(808);
  auto X = random_points(rng, 10, 2);
  ReferenceSolution ref = make_consistent_reference(km2, X, 2, rng);

  GreedyConfig cfg;
  cfg.rounds = 2;
  cfg.initial_centers = {X[0]};
  GreedyTrace trace = run_greedy(km2, X, cfg);

  // Splice in a skipped round (a selector that returned no candidates).
  RoundRecord skipped;
  skipped.skipped = true;
  skipped.cost_after = trace.rounds[0].cost_after;
  skipped.candidate_count = 0;
  trace.rounds.insert(trace.rounds.begin() + 1, skipped);

  AuditOptions opts;
  opts.gamma = std::pow(1.0 + kappa_lb(km2, ref), km2.q());
  RecurrenceReport report = audit_run(km2, X, ref, trace, opts);
  REQUIRE(report.rounds.size() == 3);
  CHECK(report.rounds[1].skipped);
  CHECK_FALSE(report.rounds[1].condition1);
  CHECK(report.rounds[0].condition1);
  CHECK(report.rounds[2].condition1);
  CHECK(report.rho_empirical == doctest::Approx(2.0 / 3.0));

  GreedyTrace parsed = parse_trace_jsonl(trace_jsonl(trace));
  CHECK(parsed.rounds[1].skipped);
  RecurrenceReport reparsed = audit_run(km2, X, ref, parsed, opts);
  CHECK(reparsed.rho_empirical == report.rho_empirical);
}

TEST_CASE("audit_run: rejects mismatched datasets") {
  RngStream rng(77);
  auto X = random_points(rng, 10, 2);
  auto other = random_points(rng, 10, 2);
  ReferenceSolution ref = make_consistent_reference(km2, X, 2, rng);
  GreedyConfig cfg;
  cfg.rounds = 1;
  cfg.initial_centers = {X[0]};
  GreedyTrace trace = run_greedy(km2, X, cfg);
  CHECK_THROWS_AS(audit_run(km2, other, ref, trace, AuditOptions{}), std::invalid_argument);
}

TEST_CASE("audit_run: planted mixture meets the select_all ratio target") {
  // Small-scale greedy reproduction: kmeans++ seeding, select_all rounds,
  // final ratio within (1+kappa_lb)^q (1+eps) after the predicted budget.
  MixtureSpec spec;
  spec.k = 3;
  spec.n_per_cluster = 12;
  spec.dim = 2;
  spec.center_box = 10.0;
  spec.spread = 0.6;
  spec.seed = 20260811;
  Mixture mix = gen_mixture(spec);
  ReferenceSolution ref = planted_reference(km2, mix);

  const double eps = 0.1;
  double gamma = std::pow(1.0 + kappa_lb(km2, ref), km2.q());

  RngStream rng(99);
  GreedyConfig cfg;
  cfg.initial_centers = kmeanspp_seed(km2, mix.points, 3, rng);
  double alpha = cost(km2, mix.points, cfg.initial_centers) / (gamma * ref.cost);
  cfg.rounds = static_cast<int>(std::ceil(3.0 * std::log(std::max(alpha - 1.0, std::exp(1.0)) / eps)));
  cfg.certify = &ref;
  GreedyTrace trace = run_greedy(km2, mix.points, cfg);

  AuditOptions opts;
  opts.gamma = gamma;
  opts.epsilon = eps;
  RecurrenceReport report = audit_run(km2, mix.points, ref, trace, opts);
  CHECK(report.final_ratio <= gamma * (1.0 + eps) + 1e-6);
  for (const auto& r : report.rounds) {
    CHECK(r.condition1);
    CHECK(r.recurrence_ok);
  }
  CHECK(report.first_round_at_target >= 0);
  CHECK(report.first_round_at_target <= cfg.rounds);
}
