#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gkm/cost.hpp"
#include "test_util.hpp"

using namespace gkm;
using namespace gkm::testutil;

namespace {
const PointSpace km1 = PointSpace::kmeans(1);
}

TEST_CASE("cost: direct arithmetic cases") {
  auto X = pts1d({0, 1, 4});
  CHECK(cost(km1, X, pts1d({0})) == 17.0);
  CHECK(cost(km1, X, pts1d({0, 4})) == 1.0);
  CHECK(cost(km1, X, X) == 0.0);
  CHECK(cost(km1, {}, pts1d({0})) == 0.0);
  CHECK_THROWS_AS(cost(km1, X, {}), std::invalid_argument);
}

TEST_CASE("normalized_cost: q handling") {
  CHECK(normalized_cost(km1, pts1d({0, 2}), pts1d({1})) == 1.0);

  // q = p = 2 on a line via the l1 norm (identical to l2 in 1-D).
  auto p2 = PointSpace::euclidean(1, Norm::l1, 2.0);
  CHECK(normalized_cost(p2, pts1d({0, 2}), pts1d({1})) == doctest::Approx(1.0));

  CHECK(normalized_cost(km1, pts1d({3}), pts1d({3, 7})) == 0.0);
  CHECK_THROWS_AS(normalized_cost(km1, {}, pts1d({0})), std::invalid_argument);
}

TEST_CASE("build_cache: sentinel and basic state") {
  auto X = pts1d({0, 1, 4});
  NearestCache cache = build_cache(km1, X, pts1d({0, 4}));
  CHECK(cache.nearest_dist(0) == 0.0);
  CHECK(cache.nearest_dist(1) == 1.0);
  CHECK(cache.nearest_dist(2) == 0.0);
  CHECK(cache.total_cost() == 1.0);
  CHECK(cache.nearest_index(1) == 0);
  CHECK(cache.nearest_index(2) == 1);

  NearestCache empty_c = build_cache(km1, X, {});
  CHECK_FALSE(empty_c.total_cost_opt().has_value());
  CHECK_THROWS_AS(empty_c.total_cost(), std::logic_error);
  CHECK(empty_c.nearest_index(0) == -1);

  NearestCache empty_x = build_cache(km1, {}, {});
  CHECK(empty_x.total_cost_opt() == 0.0);

  // Equidistant centers: the lowest center index wins.
  NearestCache tie = build_cache(km1, pts1d({1}), pts1d({0, 2}));
  CHECK(tie.nearest_index(0) == 0);
  NearestCache tie_grown = build_cache(km1, pts1d({1}), pts1d({0})).with_center(coord_point({2}));
  CHECK(tie_grown.nearest_index(0) == 0);
}

TEST_CASE("candidate_cost: evaluates without mutation") {
  auto X = pts1d({0, 1, 4});
  NearestCache cache = build_cache(km1, X, pts1d({0}));
  CHECK(cache.candidate_cost(coord_point({4})) == 1.0);
  CHECK(cache.candidate_cost(coord_point({0})) == cache.total_cost());
  CHECK(cache.total_cost() == 17.0);

  NearestCache no_centers = build_cache(km1, X, {});
  CHECK(no_centers.candidate_cost(coord_point({1})) == cost(km1, X, pts1d({1})));
}

TEST_CASE("add_center: totals and duplicates") {
  auto X = pts1d({0, 1, 4});
  NearestCache cache = build_cache(km1, X, pts1d({0}));
  CHECK(cache.total_cost() == 17.0);
  NearestCache grown = cache.with_center(coord_point({4}));
  CHECK(grown.total_cost() == 1.0);
  CHECK(cache.total_cost() == 17.0);  // original untouched

  NearestCache dup = grown.with_center(coord_point({4}));
  CHECK(dup.total_cost() == grown.total_cost());
  CHECK(dup.centers().size() == 3);
  CHECK(dup.distinct_center_count() == 2);

  NearestCache from_empty = build_cache(km1, X, {}).with_center(coord_point({1}));
  CHECK(from_empty.total_cost() == cost(km1, X, pts1d({1})));
}

TEST_CASE("assign: tie-break and trivial splits") {
  auto X = pts1d({0, 1, 4});
  Partition parts = assign(km1, X, pts1d({0, 4}));
  CHECK(parts == Partition{{0, 1}, {2}});

  Partition tie = assign(km1, pts1d({2}), pts1d({0, 4}));
  CHECK(tie == Partition{{0}, {}});

  Partition single = assign(km1, X, pts1d({1}));
  CHECK(single == Partition{{0, 1, 2}});
  CHECK_THROWS_AS(assign(km1, X, {}), std::invalid_argument);
}

TEST_CASE("property: incremental equals batch evaluation") {
  RngStream rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    RngStream t = rng.child(trial);
    PointSpace space = trial % 3 == 0 ? random_finite_metric(t, 9, 2.0) : PointSpace::kmeans(3);
    auto X = space.is_euclidean() ? random_points(t, 12, 3) : metric_points(space);
    int nc = 1 + static_cast<int>(t.uniform_int(3));
    std::vector<Point> C;
    for (int i = 0; i < nc; ++i) C.push_back(X[t.uniform_int(X.size())]);
    Point c = X[t.uniform_int(X.size())];

    NearestCache cache = build_cache(space, X, C);
    std::vector<Point> grown = C;
    grown.push_back(c);
    CHECK(approx_eq(cache.candidate_cost(c), cost(space, X, grown), 1e-9));
    CHECK(approx_eq(cache.with_center(c).total_cost(), cost(space, X, grown), 1e-9));
    CHECK(approx_eq(cache.total_cost(), cost(space, X, C), 1e-9));
  }
}

TEST_CASE("property: monotonicity and supermodularity of phi") {
  RngStream rng(1001);
  for (int trial = 0; trial < 60; ++trial) {
    RngStream t = rng.child(trial);
    PointSpace space =
        trial % 3 == 0 ? random_finite_metric(t, 8, 1.0) : PointSpace::kmeans(2);
    auto X = space.is_euclidean() ? random_points(t, 10, 2) : metric_points(space);

    std::vector<Point> C, Cbig;
    int nc = 1 + static_cast<int>(t.uniform_int(3));
    for (int i = 0; i < nc; ++i) C.push_back(X[t.uniform_int(X.size())]);
    Cbig = C;
    int extra = 1 + static_cast<int>(t.uniform_int(3));
    for (int i = 0; i < extra; ++i) Cbig.push_back(X[t.uniform_int(X.size())]);
    Point c = X[t.uniform_int(X.size())];

    double phi_c = cost(space, X, C);
    double phi_cb = cost(space, X, Cbig);
    CHECK(phi_cb <= phi_c * (1.0 + 1e-12));

    std::vector<Point> Cc = C, Cbc = Cbig;
    Cc.push_back(c);
    Cbc.push_back(c);
    double gain_small = phi_c - cost(space, X, Cc);
    double gain_big = phi_cb - cost(space, X, Cbc);
    CHECK(gain_small >= gain_big - 1e-9 * std::max({phi_c, phi_cb, 1.0}));
  }
}

TEST_CASE("property: cost decomposes over the reference partition") {
  RngStream rng(512);
  for (int trial = 0; trial < 40; ++trial) {
    RngStream t = rng.child(trial);
    auto space = PointSpace::kmeans(2);
    auto X = random_points(t, 14, 2);
    std::vector<Point> ref_centers, C;
    for (int i : distinct_indices(t, 14, 3)) ref_centers.push_back(X[i]);
    for (int i = 0; i < 2; ++i) C.push_back(X[t.uniform_int(X.size())]);

    Partition parts = assign(space, X, ref_centers);
    double total = cost(space, X, C);
    double sum = 0.0;
    for (const auto& members : parts) {
      if (members.empty()) continue;
      std::vector<Point> A;
      for (int i : members) A.push_back(X[i]);
      sum += cost(space, A, C);
    }
    CHECK(approx_eq(total, sum, 1e-9));
  }
}

TEST_CASE("property: bias-variance identity for k-means") {
  RngStream rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    RngStream t = rng.child(trial);
    int dim = 1 + static_cast<int>(t.uniform_int(5));
    auto space = PointSpace::kmeans(dim);
    auto A = random_points(t, 2 + static_cast<int>(t.uniform_int(20)), dim);
    Point z = random_points(t, 1, dim)[0];
    Point mu = mean_point(A);

    double lhs = cost(space, A, {z});
    double rhs = cost(space, A, {mu}) +
                 static_cast<double>(A.size()) * space.delta(mu, z);
    CHECK(approx_eq(lhs, rhs, 1e-9));
  }
}
