#include "gkm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gkm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double psi_from_phi(double phi, std::size_t count, double q) {
  double mean = phi / static_cast<double>(count);
  return q == 1.0 ? mean : std::pow(mean, 1.0 / q);
}

/// Per-point psi ratios psi_{x}({c}) / psi_A({c}) for one cluster; all zeros
/// when the cluster cost is zero (the 0/0 convention).
std::vector<double> cluster_psi_ratios(const PointSpace& space, const std::vector<Point>& X,
                                       const std::vector<int>& members, const Point& c) {
  double phi = 0.0;
  std::vector<double> deltas(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    deltas[i] = space.delta(X[members[i]], c);
    phi += deltas[i];
  }
  std::vector<double> ratios(members.size(), 0.0);
  if (phi <= 0.0) return ratios;
  const double q = space.q();
  double psi_a = psi_from_phi(phi, members.size(), q);
  for (std::size_t i = 0; i < members.size(); ++i) {
    double psi_x = q == 1.0 ? deltas[i] : std::pow(deltas[i], 1.0 / q);
    ratios[i] = psi_x / psi_a;
  }
  return ratios;
}

}  // namespace

double kappa_lb(const PointSpace& space, const ReferenceSolution& ref) {
  bool any = false;
  double worst = 0.0;
  for (int j = 0; j < ref.k(); ++j) {
    if (ref.partition[j].empty()) continue;
    any = true;
    auto ratios = cluster_psi_ratios(space, ref.X(), ref.partition[j], ref.centers[j]);
    worst = std::max(worst, *std::min_element(ratios.begin(), ratios.end()));
  }
  if (!any) throw std::invalid_argument("kappa_lb: degenerate reference (all clusters empty)");
  return worst;
}

std::vector<Point> core_set(const PointSpace& space, const std::vector<Point>& A, const Point& c,
                            double kappa) {
  if (A.empty()) throw std::invalid_argument("core_set: empty cluster");
  std::vector<int> members(A.size());
  for (std::size_t i = 0; i < A.size(); ++i) members[i] = static_cast<int>(i);
  auto ratios = cluster_psi_ratios(space, A, members, c);

  // The 0/0 convention: on a zero-cost cluster only zero-distance points
  // (i.e. all of them) qualify at any kappa >= 0.
  double phi = 0.0;
  for (const Point& x : A) phi += space.delta(x, c);
  std::vector<Point> out;
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (phi <= 0.0) {
      if (space.delta(A[i], c) <= 0.0) out.push_back(A[i]);
    } else if (ratios[i] <= kappa) {
      out.push_back(A[i]);
    }
  }
  return out;
}

double kappa_core(const PointSpace& space, const ReferenceSolution& ref, double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("kappa_core: epsilon must be > 0");
  bool any = false;
  double worst = 0.0;
  for (int j = 0; j < ref.k(); ++j) {
    const auto& members = ref.partition[j];
    if (members.empty()) continue;
    any = true;
    auto ratios = cluster_psi_ratios(space, ref.X(), members, ref.centers[j]);
    std::sort(ratios.begin(), ratios.end());
    double needed = epsilon * static_cast<double>(members.size()) / (1.0 + epsilon);
    // ceil with a nudge so exactly-integral targets are not bumped by fp noise
    int m_j = static_cast<int>(std::ceil(needed - 1e-12));
    m_j = std::clamp(m_j, 1, static_cast<int>(members.size()));
    worst = std::max(worst, ratios[m_j - 1]);
  }
  if (!any) throw std::invalid_argument("kappa_core: degenerate reference (all clusters empty)");
  return worst;
}

bool check_condition1(const PointSpace& space, const ReferenceSolution& ref,
                      const std::vector<Point>& Y, double gamma) {
  if (Y.empty()) throw std::invalid_argument("check_condition1: empty candidate set");
  auto min_costs = detail::min_cluster_candidate_costs(space, ref, Y, 1);
  for (int j = 0; j < ref.k(); ++j) {
    if (ref.partition[j].empty()) continue;
    if (!approx_le(min_costs[j], gamma * ref.cluster_cost(space, j))) return false;
  }
  return true;
}

namespace {

/// The max-bracket comparison behind Condition 2. The 1e-9 slack is taken
/// relative to the largest ingredient (per-cluster costs and targets), not
/// the bracket differences; this keeps the check consistent with Condition
/// 1's slack, so the implication condition1 => condition2 survives rounding.
bool condition2_holds(const std::vector<double>& cluster_cost_prev,
                      const std::vector<double>& min_costs,
                      const std::vector<double>& gamma_phi_star) {
  double lhs = 0.0, rhs = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < cluster_cost_prev.size(); ++j) {
    lhs = std::max(lhs, std::max(0.0, cluster_cost_prev[j] - min_costs[j]));
    rhs = std::max(rhs, std::max(0.0, cluster_cost_prev[j] - gamma_phi_star[j]));
    scale = std::max({scale, cluster_cost_prev[j], std::abs(min_costs[j]),
                      std::abs(gamma_phi_star[j])});
  }
  return lhs >= rhs - 1e-9 * scale;
}

}  // namespace

bool check_condition2(const PointSpace& space, const ReferenceSolution& ref,
                      const std::vector<Point>& C_prev, const std::vector<Point>& Y,
                      double gamma) {
  if (Y.empty()) throw std::invalid_argument("check_condition2: empty candidate set");
  if (C_prev.empty()) throw std::invalid_argument("check_condition2: empty current centers");
  auto min_costs = detail::min_cluster_candidate_costs(space, ref, Y, 1);
  std::vector<double> prev(ref.k()), targets(ref.k());
  for (int j = 0; j < ref.k(); ++j) {
    double phi = 0.0;
    for (int i : ref.partition[j]) {
      double best = kInf;
      for (const Point& c : C_prev) best = std::min(best, space.delta(ref.X()[i], c));
      phi += best;
    }
    prev[j] = phi;
    targets[j] = gamma * ref.cluster_cost(space, j);
  }
  return condition2_holds(prev, min_costs, targets);
}

bool check_triangle_power(const PointSpace& space, const std::vector<Point>& A,
                          const Point& c_star, const Point& y) {
  if (A.empty()) throw std::invalid_argument("check_triangle_power: empty cluster");
  double lhs = normalized_cost(space, A, {y});
  double rhs = normalized_cost(space, A, {c_star}) + normalized_cost(space, {y}, {c_star});
  return approx_le(lhs, rhs);
}

bool RecurrenceReport::all_recurrences_hold() const {
  for (const auto& r : rounds)
    if (!r.recurrence_ok) return false;
  return true;
}

RecurrenceReport audit_run(const PointSpace& space, const std::vector<Point>& X,
                           const ReferenceSolution& ref, const GreedyTrace& trace,
                           const AuditOptions& opts) {
  if (fingerprint(X) != trace.dataset_fingerprint)
    throw std::invalid_argument("audit_run: trace does not match the dataset fingerprint");
  if (ref.cost <= 0.0)
    throw std::invalid_argument("audit_run: reference solution has zero cost");

  const int k = ref.k();
  const bool select_all_trace = trace.selector == "select_all";

  // select_all candidate minima are round-independent; compute them once.
  std::optional<std::vector<double>> select_all_mins;
  if (select_all_trace)
    select_all_mins = detail::min_cluster_candidate_costs(space, ref, X, 1);

  std::vector<double> phi_star(k);
  for (int j = 0; j < k; ++j) phi_star[j] = ref.cluster_cost(space, j);

  // Replayed per-cluster and total costs under the growing center set.
  std::vector<Point> centers = trace.initial_centers;
  std::vector<double> cluster_cost(k, kInf);
  auto recompute_cluster_costs = [&]() {
    for (int j = 0; j < k; ++j) {
      if (centers.empty()) {
        cluster_cost[j] = ref.partition[j].empty() ? 0.0 : kInf;
        continue;
      }
      double phi = 0.0;
      for (int i : ref.partition[j]) {
        double best = kInf;
        for (const Point& c : centers) best = std::min(best, space.delta(X[i], c));
        phi += best;
      }
      cluster_cost[j] = phi;
    }
  };
  recompute_cluster_costs();

  RecurrenceReport report;
  report.gamma = opts.gamma;
  report.tau = opts.tau;
  report.epsilon = opts.epsilon;
  report.kappa_lb = gkm::kappa_lb(space, ref);
  report.kappa_core = gkm::kappa_core(space, ref, opts.epsilon);
  report.tau_ok = k <= 1 || opts.tau < 1.0 / (k - 1);
  report.alpha_measured =
      trace.initial_cost ? *trace.initial_cost / ref.cost : kInf;
  report.alpha_declared = opts.alpha.value_or(report.alpha_measured);

  double target = opts.gamma * (1.0 + opts.epsilon) * ref.cost;
  double cost_prev = trace.initial_cost ? *trace.initial_cost : kInf;
  if (cost_prev <= target * (1.0 + 1e-9)) report.first_round_at_target = 0;

  int held = 0;
  for (std::size_t r = 0; r < trace.rounds.size(); ++r) {
    const RoundRecord& rec = trace.rounds[r];
    RoundAudit audit;
    audit.cost_before = cost_prev;
    audit.cost_after = rec.cost_after ? *rec.cost_after : cost_prev;

    if (rec.skipped) {
      audit.skipped = true;
      report.rounds.push_back(audit);
      continue;
    }

    const std::vector<double>* min_costs = nullptr;
    if (rec.condition_certificate)
      min_costs = &*rec.condition_certificate;
    else if (select_all_mins)
      min_costs = &*select_all_mins;
    if (!min_costs)
      throw std::invalid_argument(
          "audit_run: round lacks a condition certificate; re-run greedy with the reference "
          "attached");
    if (static_cast<int>(min_costs->size()) != k)
      throw std::invalid_argument("audit_run: certificate size does not match the reference");

    audit.condition1 = true;
    for (int j = 0; j < k; ++j) {
      if (ref.partition[j].empty()) continue;
      if (!approx_le((*min_costs)[j], opts.gamma * phi_star[j])) {
        audit.condition1 = false;
        break;
      }
    }
    if (centers.empty()) {
      // Any candidate makes unbounded progress against an empty center set.
      audit.condition2 = true;
    } else {
      std::vector<double> targets(k);
      for (int j = 0; j < k; ++j) targets[j] = opts.gamma * phi_star[j];
      audit.condition2 = condition2_holds(cluster_cost, *min_costs, targets);
    }
    if (audit.condition1 && !audit.condition2) report.implication_ok = false;

    bool condition_round = audit.condition1 || audit.condition2;
    if (condition_round) {
      ++held;
      if (std::isinf(cost_prev)) {
        audit.recurrence_rhs = kInf;
        audit.recurrence_ok = true;
      } else {
        double kk = static_cast<double>(k);
        audit.recurrence_rhs = (1.0 - 1.0 / kk) * (1.0 + opts.tau) * cost_prev +
                               (opts.gamma / kk) * (1.0 + opts.tau) * ref.cost;
        audit.recurrence_ok = approx_le(audit.cost_after, audit.recurrence_rhs);
      }
    }

    centers.push_back(rec.chosen_center);
    recompute_cluster_costs();
    double total = 0.0;
    for (int j = 0; j < k; ++j) total += cluster_cost[j];
    if (rec.cost_after &&
        !(approx_eq(total, *rec.cost_after, 1e-7) || std::abs(total - *rec.cost_after) <= 1e-9))
      throw std::invalid_argument("audit_run: replayed cost diverges from the trace");

    cost_prev = audit.cost_after;
    if (report.first_round_at_target < 0 && audit.cost_after <= target * (1.0 + 1e-9))
      report.first_round_at_target = static_cast<int>(r) + 1;
    report.rounds.push_back(audit);
  }

  report.rho_empirical = trace.rounds.empty()
                             ? 0.0
                             : static_cast<double>(held) / static_cast<double>(trace.rounds.size());
  report.final_ratio = trace.final_cost() / ref.cost;
  double a = report.alpha_declared;
  report.predicted_budget =
      (a > opts.gamma && opts.epsilon > 0.0)
          ? k * std::log((a - opts.gamma) / (opts.gamma * opts.epsilon))
          : 0.0;
  return report;
}

}  // namespace gkm
