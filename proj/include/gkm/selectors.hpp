#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gkm/cost.hpp"
#include "gkm/point_space.hpp"
#include "gkm/rng.hpp"

namespace gkm {

/// Thrown when an enumeration would exceed its configured budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SelectAllSpec {};

struct SelectPpSpec {
  double epsilon = 1.0;
  int k = 1;
  std::optional<long> override_m;
};

struct SelectUniformSpec {
  long m = 1;
};

struct SubsetMeansSpec {
  double epsilon = 0.5;                // in (0, 1]
  std::uint64_t enum_limit = 2000000;  // cap on C(n+m-1, m)
};

struct SelectSgdSpec {
  double epsilon = 0.5;  // in (0, 1)
  long samples = 1;
  double step_scale = 2.0;  // eta = step_scale * r / sqrt(s)
};

struct SelectBallSpec {
  double epsilon = 0.5;  // in (0, 1)
  long samples = 1;
};

using SelectorSpec = std::variant<SelectAllSpec, SelectPpSpec, SelectUniformSpec,
                                  SubsetMeansSpec, SelectSgdSpec, SelectBallSpec>;

std::string selector_name(const SelectorSpec& spec);

/// Candidate-count cap applied to computed (non-overridden) sample counts.
inline constexpr long kSampleCap = 1000000;

/// The count 4k((1+eps)/eps)^(q+4) before capping.
double select_pp_prescribed_count(int k, double epsilon, double q);

/// The count 2n^(3+ceil(1/eps^2)); astronomically conservative, reported for
/// reference while the configured `samples` field is what actually runs.
double select_sgd_prescribed_count(long n, double epsilon);

/// The count n^3 eps^(-qd/p) with unit constant (the bound hides one).
double select_ball_prescribed_count(long n, double epsilon, double q, int dim, double p);

/// select(): the whole dataset is the candidate set.
const std::vector<Point>& select_all(const std::vector<Point>& X);

/// select++: m i.i.d. samples with Pr[x] proportional to Delta(x, C).
/// With no centers the draw is uniform; with zero total cost a single uniform
/// point is returned and *zero_cost is set.
std::vector<Point> select_pp(const NearestCache& cache, const SelectPpSpec& spec,
                             RngStream& rng, bool* zero_cost = nullptr);

/// m i.i.d. uniform draws from X, with replacement.
std::vector<Point> select_uniform(const std::vector<Point>& X, const SelectUniformSpec& spec,
                                  RngStream& rng);

/// Means of all size-ceil(1/eps) multisets of X, deduplicated exactly.
/// Round-independent; k-means spaces only. Throws BudgetError when
/// C(n+m-1, m) exceeds spec.enum_limit.
std::vector<Point> subset_means(const PointSpace& space, const std::vector<Point>& X,
                                const SubsetMeansSpec& spec);

/// The guessed triple (y, m, B): anchor, cluster-size guess, nearest set.
struct BallGuess {
  Point y;
  int y_index = -1;
  int m = 1;                   // guessed |A|
  std::vector<Point> B;        // the b points closest to y (lowest index ties)
  std::vector<int> b_indices;  // indices of B in X
  int b = 1;
  double phi_b = 0.0;       // phi_B({y})
  double r_estimate = 0.0;  // phi_B({y}) / m
};

BallGuess guess_ball(const PointSpace& space, const std::vector<Point>& X, RngStream& rng);

/// Projected stochastic subgradient descent on w -> ||x - w||_2 over the l2
/// ball of `radius` around `start`; returns the unweighted average of the
/// iterates w_1..w_steps. Requires a euclidean l2 space with p = 1.
/// When `iterates` is given, the visited w_1..w_steps are appended to it.
Point sgd_ball(const std::function<Point(RngStream&)>& sample_stream, const PointSpace& space,
               const Point& start, double radius, long steps, double step_size, RngStream& rng,
               std::vector<Point>* iterates = nullptr);

/// Candidates from guess_ball + sgd_ball pipelines; stream data is drawn
/// uniformly from X. Requires euclidean l2 with p = 1.
std::vector<Point> select_sgd(const PointSpace& space, const std::vector<Point>& X,
                              const SelectSgdSpec& spec, RngStream& rng);

/// Candidates sampled uniformly from the D-ball of radius
/// 2*(phi_B({y})/m)^(1/p) around each guess_ball anchor. Euclidean only.
std::vector<Point> select_ball(const PointSpace& space, const std::vector<Point>& X,
                               const SelectBallSpec& spec, RngStream& rng);

/// kmeans++ seeding: first center uniform, each subsequent center sampled
/// with Pr[x] proportional to Delta(x, current centers).
std::vector<Point> kmeanspp_seed(const PointSpace& space, const std::vector<Point>& X, int t,
                                 RngStream& rng);

/// Seeding with the cost after each added center (for cost-vs-centers curves).
struct SeedTrace {
  std::vector<Point> centers;
  std::vector<double> costs;
};
SeedTrace kmeanspp_seed_trace(const PointSpace& space, const std::vector<Point>& X, int t,
                              RngStream& rng);

/// Round-facing selector dispatch used by the greedy loop. Owns the
/// subset-means memo (that candidate set is round-independent).
class CandidateSource {
 public:
  CandidateSource(PointSpace space, SelectorSpec spec);

  /// Candidates for one round; the span stays valid until the next call.
  std::span<const Point> round_candidates(const NearestCache& cache, RngStream& rng);

  const std::string& name() const { return name_; }
  bool zero_cost_flagged() const { return zero_cost_; }

 private:
  PointSpace space_;
  SelectorSpec spec_;
  std::string name_;
  std::vector<Point> scratch_;
  std::optional<std::vector<Point>> memo_;
  bool zero_cost_ = false;
};

}  // namespace gkm
