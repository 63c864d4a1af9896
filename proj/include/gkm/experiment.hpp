#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gkm/dataset.hpp"
#include "gkm/greedy.hpp"
#include "gkm/point_space.hpp"
#include "gkm/selectors.hpp"

namespace gkm {

struct AlgorithmSpec {
  std::string name;
  bool baseline_kmeanspp = false;  // pure kmeans++ seeding, no greedy loop
  SelectorSpec selector = SelectAllSpec{};
  enum class C0Policy { empty, kmeanspp, provided };
  C0Policy c0_policy = C0Policy::empty;
  int c0_count = 0;                // kmeanspp policy
  std::vector<Point> c0_points;    // provided policy
  int t = 0;
  double tau = 0.0;
};

struct ExperimentConfig {
  std::string dataset = "mixture";  // "mixture" or a CSV path
  std::string format = "points_csv";
  bool allow_invalid_metric = false;
  std::string space_kind = "kmeans";  // kmeans | euclidean | metric
  double p = 2.0;
  Norm norm = Norm::l2;
  MixtureSpec mixture;
  std::vector<AlgorithmSpec> algorithms;
  int repeats = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output = "results";
  std::vector<std::string> metrics = {"median_cost", "min_cost", "cost_curve", "ratios"};
  bool emit_traces = false;
};

/// Flat key=value config file; '#' starts a comment. See the README for the
/// key grammar. Throws std::runtime_error on unknown keys or bad values.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Per-(algorithm, repeat) run seed: base xor hash(name, repeat).
std::uint64_t run_seed(std::uint64_t base, const std::string& name, int repeat);

struct RunRecord {
  std::string algorithm;
  int repeat = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double final_cost = 0.0;
  int distinct_centers = 0;
  std::vector<std::pair<int, double>> curve;  // (distinct centers, cost)
  std::uint64_t trace_fingerprint = 0;
  double wall_ms = 0.0;  // not serialized: result.json must be byte-deterministic
  GreedyTrace trace;     // written out only with emit_traces
};

struct RunResult {
  struct Aggregate {
    std::string algorithm;
    double median_cost = 0.0;
    double min_cost = 0.0;
  };
  struct Ratio {
    std::string numerator;
    std::string denominator;
    double median_ratio = 0.0;
    double min_ratio = 0.0;
  };
  std::vector<RunRecord> runs;  // ordered by (algorithm, repeat)
  std::vector<Aggregate> aggregates;
  std::vector<Ratio> ratios;
  bool any_failed = false;
};

/// The dataset plus the space it lives in, resolved from a config.
struct ResolvedDataset {
  PointSpace space;
  std::vector<Point> points;
  std::optional<Mixture> mixture;  // when generated
};

ResolvedDataset resolve_dataset(const ExperimentConfig& config);

/// Executes every (algorithm, repeat) pair; repeats run concurrently on
/// config.threads workers with results placed in deterministic slots.
RunResult run_experiment(const ExperimentConfig& config);
RunResult run_experiment(const ExperimentConfig& config, const ResolvedDataset& data);

/// result.json (schema 1) plus curve.csv, and trace.jsonl files
/// when emit_traces is set. Creates the output directory.
void write_run_result(const ExperimentConfig& config, const RunResult& result);

std::string result_json(const ExperimentConfig& config, const RunResult& result);
std::string curve_csv(const RunResult& result);

/// Greedy trace JSONL: a header record (round 0) followed by one record per
/// round with fields round, cost, center, candidates, skipped.
std::string trace_jsonl(const GreedyTrace& trace);
GreedyTrace parse_trace_jsonl(const std::string& text);
GreedyTrace load_trace_jsonl(const std::string& path);

/// Extracts the cost-vs-distinct-centers curve replayed from a trace.
std::vector<std::pair<int, double>> cost_curve(const GreedyTrace& trace);

}  // namespace gkm
