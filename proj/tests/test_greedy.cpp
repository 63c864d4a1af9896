#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gkm/greedy.hpp"
#include "test_util.hpp"

using namespace gkm;
using namespace gkm::testutil;

namespace {
const PointSpace km1 = PointSpace::kmeans(1);
}

TEST_CASE("pick_candidate: exact argmin and tolerance scan") {
  auto X = pts1d({0, 1, 4});
  NearestCache cache = build_cache(km1, X, pts1d({0}));

  auto Y = pts1d({1, 4});
  CHECK(pick_candidate(cache, Y, 0.0) == coord_point({4}));

  auto singleton = pts1d({2.5});
  CHECK(pick_candidate(cache, singleton, 0.0) == coord_point({2.5}));
  CHECK(pick_candidate(cache, singleton, 10.0) == coord_point({2.5}));

  // costs: {4} -> 1, {3.9} -> 1.01; with tau = 0.5 the lowest index within
  // 1.5x of the minimum wins.
  auto Y2 = pts1d({4, 3.9});
  CHECK(pick_candidate(cache, Y2, 0.5) == coord_point({4}));
  auto Y3 = pts1d({3.9, 4});
  CHECK(pick_candidate(cache, Y3, 0.5) == coord_point({3.9}));

  CHECK_THROWS_AS(pick_candidate(cache, std::vector<Point>{}, 0.0), std::invalid_argument);
}

TEST_CASE("pick_candidate: thread count does not change the pick") {
  RngStream rng(5);
  auto X = random_points(rng, 200, 3);
  NearestCache cache = build_cache(PointSpace::kmeans(3), X, {X[0]});
  auto p1 = detail::pick_candidate_indexed(cache, X, 0.0, 1);
  auto p4 = detail::pick_candidate_indexed(cache, X, 0.0, 4);
  CHECK(p1.index == p4.index);
  CHECK(p1.cost == p4.cost);
}

TEST_CASE("run_greedy: worked 1-D examples") {
  auto X = pts1d({0, 1, 4});

  GreedyConfig cfg;
  cfg.rounds = 0;
  cfg.initial_centers = pts1d({0});
  GreedyTrace t0 = run_greedy(km1, X, cfg);
  CHECK(t0.rounds.empty());
  CHECK(t0.final_centers == pts1d({0}));
  CHECK(t0.final_cost() == 17.0);

  cfg.rounds = 2;
  GreedyTrace t2 = run_greedy(km1, X, cfg);
  REQUIRE(t2.rounds.size() == 2);
  CHECK(t2.rounds[0].chosen_center == coord_point({4}));
  CHECK(t2.rounds[0].cost_after == 1.0);
  CHECK(t2.rounds[1].chosen_center == coord_point({1}));
  CHECK(t2.rounds[1].cost_after == 0.0);
  CHECK(t2.rounds[0].candidate_count == 3);

  GreedyConfig from_empty;
  from_empty.rounds = 1;
  GreedyTrace t1 = run_greedy(km1, X, from_empty);
  REQUIRE(t1.rounds.size() == 1);
  CHECK_FALSE(t1.initial_cost.has_value());
  CHECK(t1.rounds[0].chosen_center == coord_point({1}));
  CHECK(t1.rounds[0].cost_after == 10.0);
}

TEST_CASE("run_greedy: deterministic traces, bit-identical") {
  RngStream rng(77);
  auto X = random_points(rng, 40, 2);
  GreedyConfig cfg;
  cfg.rounds = 6;
  cfg.selector = SelectPpSpec{1.0, 3, 25};
  cfg.seed = 123456;
  cfg.initial_centers = {X[0]};

  auto space = PointSpace::kmeans(2);
  GreedyTrace a = run_greedy(space, X, cfg);
  GreedyTrace b = run_greedy(space, X, cfg);
  CHECK(a.trace_fingerprint() == b.trace_fingerprint());
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    CHECK(a.rounds[i].cost_after == b.rounds[i].cost_after);
    CHECK(a.rounds[i].chosen_center == b.rounds[i].chosen_center);
  }

  cfg.threads = 4;
  GreedyTrace c = run_greedy(space, X, cfg);
  CHECK(c.trace_fingerprint() == a.trace_fingerprint());
}

TEST_CASE("run_greedy: cost_after never increases") {
  RngStream rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    RngStream t = rng.child(trial);
    PointSpace space = trial % 2 ? PointSpace::kmeans(2)
                                 : PointSpace::euclidean(2, Norm::l1, 1.0);
    auto X = random_points(t, 25, 2);
    GreedyConfig cfg;
    cfg.rounds = 8;
    cfg.seed = t.next_u64();
    cfg.selector = trial % 3 == 0 ? SelectorSpec{SelectUniformSpec{5}}
                                  : SelectorSpec{SelectPpSpec{1.0, 2, 10}};
    GreedyTrace trace = run_greedy(space, X, cfg);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : trace.rounds) {
      REQUIRE(r.cost_after.has_value());
      CHECK(*r.cost_after <= prev);
      prev = *r.cost_after;
    }
  }
}

TEST_CASE("run_greedy: select_all covers distinct points in n - |C0| rounds") {
  RngStream rng(8);
  auto X = random_points(rng, 12, 2);
  auto space = PointSpace::kmeans(2);

  GreedyConfig cfg;
  cfg.rounds = 12;
  GreedyTrace from_empty = run_greedy(space, X, cfg);
  CHECK(from_empty.final_cost() == 0.0);

  cfg.initial_centers = {X[0], X[5]};
  cfg.rounds = 10;
  GreedyTrace seeded = run_greedy(space, X, cfg);
  CHECK(seeded.final_cost() == 0.0);
}

TEST_CASE("run_greedy: selector failure carries the round index") {
  auto X = pts1d({0, 1, 4});
  GreedyConfig cfg;
  cfg.rounds = 1;
  cfg.selector = SubsetMeansSpec{0.5, 1};  // budget of 1 multiset: must throw
  try {
    run_greedy(km1, X, cfg);
    FAIL("expected selector failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("round 1") != std::string::npos);
  }
}

TEST_CASE("run_greedy: certificates recorded when a reference is attached") {
  RngStream rng(64);
  auto X = random_points(rng, 15, 2);
  auto space = PointSpace::kmeans(2);
  ReferenceSolution ref = make_consistent_reference(space, X, 2, rng);

  GreedyConfig cfg;
  cfg.rounds = 3;
  cfg.certify = &ref;
  cfg.initial_centers = {X[0]};
  GreedyTrace trace = run_greedy(space, X, cfg);
  for (const auto& r : trace.rounds) {
    REQUIRE(r.condition_certificate.has_value());
    CHECK(r.condition_certificate->size() == 2);
    // Certified minima over Y = X match a direct scan.
    for (int j = 0; j < 2; ++j) {
      double direct = std::numeric_limits<double>::infinity();
      auto A = ref.cluster(j);
      for (const Point& c : X) direct = std::min(direct, cost(space, A, {c}));
      CHECK((*r.condition_certificate)[j] == direct);
    }
  }
}
