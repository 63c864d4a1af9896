#pragma once

#include <optional>
#include <vector>

#include "gkm/greedy.hpp"
#include "gkm/reference.hpp"

namespace gkm {

/// Data-dependent lower constant: the max over nonempty clusters of
/// min_x psi_{x}({c*_j}) / psi_{A*_j}({c*_j}), in [0, 1]. Zero-cost clusters
/// contribute 0. Throws when every cluster is empty.
double kappa_lb(const PointSpace& space, const ReferenceSolution& ref);

/// core(A; kappa): points of A whose single-point psi-distance to c is at
/// most kappa times psi_A({c}).
std::vector<Point> core_set(const PointSpace& space, const std::vector<Point>& A, const Point& c,
                            double kappa);

/// The infimum kappa such that every cluster keeps at least
/// eps*|A*_j|/(1+eps) of its points in core(A*_j; kappa). Satisfies
/// kappa_lb <= kappa_core <= (1+eps)^(1/q).
double kappa_core(const PointSpace& space, const ReferenceSolution& ref, double epsilon);

/// Condition 1: every nonempty cluster has a candidate c in Y with
/// phi_{A*_j}({c}) <= gamma * phi_{A*_j}({c*_j}), up to 1e-9 relative slack.
bool check_condition1(const PointSpace& space, const ReferenceSolution& ref,
                      const std::vector<Point>& Y, double gamma);

/// Condition 2: the max-bracket inequality comparing the best per-cluster
/// candidate improvement against the gamma-target improvement.
bool check_condition2(const PointSpace& space, const ReferenceSolution& ref,
                      const std::vector<Point>& C_prev, const std::vector<Point>& Y,
                      double gamma);

/// Power-mean triangle bound: psi_A({y}) <= psi_A({c*}) + psi_{{y}}({c*}).
/// For k-means this requires c* = mu(A) to hold.
bool check_triangle_power(const PointSpace& space, const std::vector<Point>& A,
                          const Point& c_star, const Point& y);

struct AuditOptions {
  double gamma = 1.0;
  double tau = 0.0;
  double epsilon = 0.1;                  // declared epsilon for budgets/targets
  std::optional<double> alpha;           // declared alpha; measured when unset
};

struct RoundAudit {
  bool skipped = false;
  bool condition1 = false;
  bool condition2 = false;
  bool condition_applicable = true;  // false when the round lacks a certificate
  bool recurrence_ok = true;         // checked only on condition rounds
  double cost_before = 0.0;          // +inf encoded as infinity when C empty
  double cost_after = 0.0;
  double recurrence_rhs = 0.0;
};

struct RecurrenceReport {
  std::vector<RoundAudit> rounds;
  double gamma = 1.0;
  double tau = 0.0;
  double epsilon = 0.1;
  double alpha_declared = 0.0;
  double alpha_measured = 0.0;  // phi(C_0)/phi(C*); +inf when C_0 empty
  double kappa_lb = 0.0;
  double kappa_core = 0.0;
  double rho_empirical = 0.0;  // fraction of rounds where a condition held
  double final_ratio = 0.0;    // phi(C_t)/phi(C*)
  double predicted_budget = 0.0;  // k ln((alpha-gamma)/(gamma eps)), 0 if n/a
  int first_round_at_target = -1;  // first round with cost <= gamma(1+eps)phi*
  bool tau_ok = true;              // tau < 1/(k-1)
  bool implication_ok = true;      // condition1 => condition2 on every round

  bool all_recurrences_hold() const;
};

/// Replays the trace against the reference solution, certifying Conditions
/// 1/2 per round and the per-round recurrence on condition rounds.
///
/// Per-round candidate minima come from the trace's condition certificates
/// (recorded when run_greedy was given the reference); traces produced by
/// select_all are audited without certificates since their candidate set is
/// the whole dataset. Throws when the trace fingerprint does not match X or
/// when certificates are required but absent.
RecurrenceReport audit_run(const PointSpace& space, const std::vector<Point>& X,
                           const ReferenceSolution& ref, const GreedyTrace& trace,
                           const AuditOptions& opts);

}  // namespace gkm
