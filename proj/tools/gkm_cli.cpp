#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gkm/dataset.hpp"
#include "gkm/diagnostics.hpp"
#include "gkm/experiment.hpp"
#include "gkm/oracle.hpp"

namespace {

using nlohmann::ordered_json;

gkm::PointSpace space_from_flags(int dim, const std::string& kind, double p,
                                 const std::string& norm) {
  if (kind == "kmeans") return gkm::PointSpace::kmeans(dim);
  if (kind == "euclidean") return gkm::PointSpace::euclidean(dim, gkm::parse_norm(norm), p);
  throw std::runtime_error("unsupported space kind: " + kind);
}

int cmd_run(const std::string& config_path, std::uint64_t seed_override, bool seed_set,
            int threads_override, bool threads_set, const std::string& output_override,
            bool emit_traces, bool allow_invalid_metric) {
  gkm::ExperimentConfig config;
  try {
    config = gkm::parse_config_file(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  }
  if (seed_set) config.seed = seed_override;
  if (threads_set) config.threads = threads_override;
  if (!output_override.empty()) config.output = output_override;
  if (emit_traces) config.emit_traces = true;
  if (allow_invalid_metric) config.allow_invalid_metric = true;

  gkm::RunResult result = gkm::run_experiment(config);
  gkm::write_run_result(config, result);
  for (const auto& run : result.runs) {
    std::fprintf(stderr, "[run] %s repeat=%d %s cost=%.6g (%.1f ms)\n", run.algorithm.c_str(),
                 run.repeat, run.failed ? "FAILED" : "ok", run.final_cost, run.wall_ms);
    if (run.failed) std::fprintf(stderr, "      %s\n", run.error.c_str());
  }
  std::printf("wrote %s/result.json\n", config.output.c_str());
  return result.any_failed ? 1 : 0;
}

int cmd_gen(const gkm::MixtureSpec& spec, const std::string& output) {
  namespace fs = std::filesystem;
  gkm::Mixture mix = gkm::gen_mixture(spec);
  fs::create_directories(output);
  gkm::write_points_csv((fs::path(output) / "points.csv").string(), mix.points);

  gkm::PointSpace space = gkm::PointSpace::kmeans(spec.dim);
  gkm::ReferenceSolution ref = gkm::planted_reference(space, mix);
  ordered_json j;
  j["k"] = ref.k();
  j["cost"] = ref.cost;
  ordered_json centers = ordered_json::array();
  for (const auto& c : ref.centers) centers.push_back(c.coords);
  j["centers"] = centers;
  std::ofstream os(fs::path(output) / "reference.json");
  os << j.dump(2) << "\n";
  std::printf("wrote %s/points.csv and reference.json (n=%zu, phi*=%.6g)\n", output.c_str(),
              mix.points.size(), ref.cost);
  return 0;
}

int cmd_oracle(const std::string& dataset, int k, const std::string& kind,
               const std::string& space_kind, double p, const std::string& norm) {
  gkm::LoadedPoints loaded = gkm::load_points_csv(dataset);
  gkm::PointSpace space = space_from_flags(loaded.dim, space_kind, p, norm);
  if (kind == "medoids") {
    auto result = gkm::brute_force_medoids(space, loaded.points, k);
    std::printf("medoid cost: %.17g\n", result.cost);
    std::printf("medoid indices:");
    for (int i : result.indices) std::printf(" %d", i);
    std::printf("\n");
  } else if (kind == "kmeans") {
    auto result = gkm::brute_force_kmeans(space, loaded.points, k);
    std::printf("kmeans cost: %.17g\n", result.cost);
    std::printf("parts: %zu\n", result.partition.size());
  } else {
    throw std::runtime_error("oracle kind must be medoids or kmeans");
  }
  return 0;
}

int cmd_audit(const std::string& trace_path, const std::string& reference_path,
              const std::string& dataset, double gamma, bool gamma_set, double tau,
              double epsilon, const std::string& space_kind, double p, const std::string& norm) {
  gkm::GreedyTrace trace = gkm::load_trace_jsonl(trace_path);
  gkm::LoadedPoints loaded = gkm::load_points_csv(dataset);
  gkm::PointSpace space = space_from_flags(loaded.dim, space_kind, p, norm);

  std::ifstream in(reference_path);
  if (!in) throw std::runtime_error("cannot open reference " + reference_path);
  ordered_json j = ordered_json::parse(in);
  std::vector<gkm::Point> centers;
  for (const auto& c : j.at("centers")) centers.push_back(gkm::coord_point(c.get<std::vector<double>>()));
  gkm::ReferenceSolution ref = gkm::make_reference(space, loaded.points, std::move(centers));

  gkm::AuditOptions opts;
  opts.gamma = gamma_set ? gamma : std::pow(1.0 + gkm::kappa_lb(space, ref), space.q());
  opts.tau = tau;
  opts.epsilon = epsilon;
  gkm::RecurrenceReport report = gkm::audit_run(space, loaded.points, ref, trace, opts);

  ordered_json out;
  out["gamma"] = report.gamma;
  out["tau"] = report.tau;
  out["epsilon"] = report.epsilon;
  out["alpha_declared"] = report.alpha_declared;
  out["alpha_measured"] = report.alpha_measured;
  out["kappa_lb"] = report.kappa_lb;
  out["kappa_core"] = report.kappa_core;
  out["rho_empirical"] = report.rho_empirical;
  out["final_ratio"] = report.final_ratio;
  out["predicted_budget"] = report.predicted_budget;
  out["first_round_at_target"] = report.first_round_at_target;
  out["tau_ok"] = report.tau_ok;
  out["implication_ok"] = report.implication_ok;
  ordered_json rounds = ordered_json::array();
  for (const auto& r : report.rounds) {
    ordered_json rj;
    rj["skipped"] = r.skipped;
    rj["condition1"] = r.condition1;
    rj["condition2"] = r.condition2;
    rj["recurrence_ok"] = r.recurrence_ok;
    rj["cost_after"] = r.cost_after;
    rounds.push_back(std::move(rj));
  }
  out["rounds"] = rounds;
  std::cout << out.dump(2) << "\n";
  return report.implication_ok && report.all_recurrences_hold() ? 0 : 1;
}

int cmd_check_metric(const std::string& path) {
  gkm::LoadedMetric metric = gkm::load_metric_csv(path);
  if (metric.report.valid()) {
    std::printf("valid\n");
    return 0;
  }
  std::printf("%s\n", metric.report.summary().c_str());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"greedy bi-criteria clustering toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::uint64_t seed = 0;
  int threads = 1;
  std::string output;
  bool seed_set = false, threads_set = false;
  app.add_option("--seed", seed, "base RNG seed")->each([&](const std::string&) { seed_set = true; });
  app.add_option("--threads", threads, "worker threads")
      ->each([&](const std::string&) { threads_set = true; });
  app.add_option("--output", output, "output directory override");

  auto* run = app.add_subcommand("run", "run an experiment config");
  std::string run_config;
  bool emit_traces = false;
  bool allow_invalid_metric = false;
  run->add_option("config", run_config, "experiment config file")->required();
  run->add_flag("--emit-traces", emit_traces, "write trace.jsonl per run");
  run->add_flag("--allow-invalid-metric", allow_invalid_metric,
                "accept metric CSVs that fail validation");

  auto* gen = app.add_subcommand("gen", "generate a planted Gaussian mixture");
  gkm::MixtureSpec mix;
  std::string gen_output = "mixture_out";
  gen->add_option("--k", mix.k, "clusters")->required();
  gen->add_option("--n-per-cluster", mix.n_per_cluster, "points per cluster")->required();
  gen->add_option("--dim", mix.dim, "dimension")->required();
  gen->add_option("--center-box", mix.center_box, "centers uniform in [-box, box]^dim");
  gen->add_option("--spread", mix.spread, "per-cluster Gaussian std");
  gen->add_option("--mixture-seed", mix.seed, "mixture seed");
  gen->add_option("--out", gen_output, "output directory");

  auto* oracle = app.add_subcommand("oracle", "brute-force optimum on a tiny dataset");
  std::string oracle_dataset, oracle_kind = "medoids";
  std::string space_kind = "kmeans", norm = "l2";
  double space_p = 2.0;
  int oracle_k = 1;
  oracle->add_option("dataset", oracle_dataset, "points CSV")->required();
  oracle->add_option("--k", oracle_k, "number of centers")->required();
  oracle->add_option("--kind", oracle_kind, "medoids | kmeans");
  oracle->add_option("--space", space_kind, "kmeans | euclidean");
  oracle->add_option("--p", space_p, "cost exponent for euclidean spaces");
  oracle->add_option("--norm", norm, "l2 | l1 | linf");

  auto* audit = app.add_subcommand("audit", "audit a greedy trace against a reference");
  std::string audit_trace, audit_reference, audit_dataset;
  double audit_gamma = 0.0, audit_tau = 0.0, audit_epsilon = 0.1;
  bool gamma_set = false;
  audit->add_option("trace", audit_trace, "trace.jsonl")->required();
  audit->add_option("reference", audit_reference, "reference.json")->required();
  audit->add_option("--dataset", audit_dataset, "points CSV")->required();
  audit->add_option("--gamma", audit_gamma, "condition constant (default (1+kappa_lb)^q)")
      ->each([&](const std::string&) { gamma_set = true; });
  audit->add_option("--tau", audit_tau, "greedy tolerance");
  audit->add_option("--epsilon", audit_epsilon, "declared epsilon");
  audit->add_option("--space", space_kind, "kmeans | euclidean");
  audit->add_option("--p", space_p, "cost exponent for euclidean spaces");
  audit->add_option("--norm", norm, "l2 | l1 | linf");

  auto* check = app.add_subcommand("check-metric", "validate a finite-metric CSV");
  std::string check_path;
  check->add_option("csv", check_path, "distance matrix CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run)
      return cmd_run(run_config, seed, seed_set, threads, threads_set, output, emit_traces,
                     allow_invalid_metric);
    if (*gen) return cmd_gen(mix, output.empty() ? gen_output : output);
    if (*oracle) return cmd_oracle(oracle_dataset, oracle_k, oracle_kind, space_kind, space_p, norm);
    if (*audit)
      return cmd_audit(audit_trace, audit_reference, audit_dataset, audit_gamma, gamma_set,
                       audit_tau, audit_epsilon, space_kind, space_p, norm);
    if (*check) return cmd_check_metric(check_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
