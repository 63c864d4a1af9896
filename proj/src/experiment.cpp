#include "gkm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace gkm {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  std::size_t lo = s.find_first_not_of(" \t\r");
  if (lo == std::string::npos) return "";
  std::size_t hi = s.find_last_not_of(" \t\r");
  return s.substr(lo, hi - lo + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::runtime_error("");
    return d;
  } catch (...) {
    throw std::runtime_error("config: bad number for " + key + ": '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used;
    long d = std::stol(v, &used);
    if (used != v.size()) throw std::runtime_error("");
    return d;
  } catch (...) {
    throw std::runtime_error("config: bad integer for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::runtime_error("config: bad boolean for " + key + ": '" + v + "'");
}

struct AlgoDraft {
  std::string selector = "select_all";
  std::map<std::string, std::string> fields;
};

AlgorithmSpec build_algorithm(const std::string& name, const AlgoDraft& draft) {
  AlgorithmSpec spec;
  spec.name = name;
  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = draft.fields.find(key);
    if (it == draft.fields.end()) return std::nullopt;
    return it->second;
  };
  auto prefix = [&](const char* key) { return "algorithm." + name + "." + key; };

  const std::string& kind = draft.selector;
  if (kind == "kmeanspp") {
    spec.baseline_kmeanspp = true;
  } else if (kind == "select_all") {
    spec.selector = SelectAllSpec{};
  } else if (kind == "select_pp") {
    SelectPpSpec pp;
    if (auto v = get("epsilon")) pp.epsilon = to_double(prefix("epsilon"), *v);
    if (auto v = get("k")) pp.k = static_cast<int>(to_long(prefix("k"), *v));
    if (auto v = get("m")) pp.override_m = to_long(prefix("m"), *v);
    spec.selector = pp;
  } else if (kind == "select_uniform") {
    SelectUniformSpec u;
    if (auto v = get("m")) u.m = to_long(prefix("m"), *v);
    spec.selector = u;
  } else if (kind == "subset_means") {
    SubsetMeansSpec sm;
    if (auto v = get("epsilon")) sm.epsilon = to_double(prefix("epsilon"), *v);
    if (auto v = get("enum_limit"))
      sm.enum_limit = static_cast<std::uint64_t>(to_long(prefix("enum_limit"), *v));
    spec.selector = sm;
  } else if (kind == "select_sgd") {
    SelectSgdSpec sgd;
    if (auto v = get("epsilon")) sgd.epsilon = to_double(prefix("epsilon"), *v);
    if (auto v = get("samples")) sgd.samples = to_long(prefix("samples"), *v);
    if (auto v = get("step_scale")) sgd.step_scale = to_double(prefix("step_scale"), *v);
    spec.selector = sgd;
  } else if (kind == "select_ball") {
    SelectBallSpec ball;
    if (auto v = get("epsilon")) ball.epsilon = to_double(prefix("epsilon"), *v);
    if (auto v = get("samples")) ball.samples = to_long(prefix("samples"), *v);
    spec.selector = ball;
  } else {
    throw std::runtime_error("config: unknown selector '" + kind + "' for algorithm " + name);
  }

  if (auto v = get("t")) spec.t = static_cast<int>(to_long(prefix("t"), *v));
  if (auto v = get("tau")) spec.tau = to_double(prefix("tau"), *v);
  if (auto v = get("c0")) {
    const std::string& c0 = *v;
    if (c0 == "empty") {
      spec.c0_policy = AlgorithmSpec::C0Policy::empty;
    } else if (c0.rfind("kmeanspp:", 0) == 0) {
      spec.c0_policy = AlgorithmSpec::C0Policy::kmeanspp;
      spec.c0_count = static_cast<int>(to_long(prefix("c0"), c0.substr(9)));
    } else if (c0.rfind("provided:", 0) == 0) {
      spec.c0_policy = AlgorithmSpec::C0Policy::provided;
      spec.c0_points = load_points_csv(c0.substr(9)).points;
    } else {
      throw std::runtime_error("config: bad c0 policy '" + c0 + "' for algorithm " + name);
    }
  }
  return spec;
}

const char* const kAlgoFields[] = {"selector", "t",       "tau",        "epsilon",   "k",
                                   "m",        "samples", "step_scale", "enum_limit", "c0"};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::vector<std::string> algo_order;
  std::map<std::string, AlgoDraft> drafts;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (key == "dataset") cfg.dataset = value;
    else if (key == "format") cfg.format = value;
    else if (key == "allow_invalid_metric") cfg.allow_invalid_metric = to_bool(key, value);
    else if (key == "space") cfg.space_kind = value;
    else if (key == "p") cfg.p = to_double(key, value);
    else if (key == "norm") cfg.norm = parse_norm(value);
    else if (key == "repeats") cfg.repeats = static_cast<int>(to_long(key, value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "threads") cfg.threads = static_cast<int>(to_long(key, value));
    else if (key == "output") cfg.output = value;
    else if (key == "metrics") cfg.metrics = split(value, ',');
    else if (key == "emit_traces") cfg.emit_traces = to_bool(key, value);
    else if (key == "mixture.k") cfg.mixture.k = static_cast<int>(to_long(key, value));
    else if (key == "mixture.n_per_cluster")
      cfg.mixture.n_per_cluster = static_cast<int>(to_long(key, value));
    else if (key == "mixture.dim") cfg.mixture.dim = static_cast<int>(to_long(key, value));
    else if (key == "mixture.center_box") cfg.mixture.center_box = to_double(key, value);
    else if (key == "mixture.spread") cfg.mixture.spread = to_double(key, value);
    else if (key == "mixture.seed") cfg.mixture.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key.rfind("algorithm.", 0) == 0) {
      std::string rest = key.substr(10);
      auto dot = rest.find('.');
      if (dot == std::string::npos)
        throw std::runtime_error("config: expected algorithm.<name>.<field>, got " + key);
      std::string name = rest.substr(0, dot);
      std::string field = rest.substr(dot + 1);
      bool known = false;
      for (const char* f : kAlgoFields) known = known || field == f;
      if (!known) throw std::runtime_error("config: unknown algorithm field '" + field + "'");
      if (!drafts.count(name)) algo_order.push_back(name);
      if (field == "selector") drafts[name].selector = value;
      else drafts[name].fields[field] = value;
    } else {
      throw std::runtime_error("config: unknown key '" + key + "'");
    }
  }

  for (const auto& name : algo_order) cfg.algorithms.push_back(build_algorithm(name, drafts[name]));
  if (cfg.algorithms.empty()) throw std::runtime_error("config: no algorithms declared");
  if (cfg.repeats < 1) throw std::runtime_error("config: repeats must be >= 1");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::uint64_t run_seed(std::uint64_t base, const std::string& name, int repeat) {
  return base ^ hash_combine(fnv1a(name), static_cast<std::uint64_t>(repeat));
}

ResolvedDataset resolve_dataset(const ExperimentConfig& config) {
  if (config.space_kind == "metric" || config.format == "metric_csv") {
    if (config.dataset == "mixture")
      throw std::runtime_error("config: mixtures require a euclidean space");
    LoadedMetric metric = load_metric_csv(config.dataset);
    if (!metric.report.valid() && !config.allow_invalid_metric)
      throw std::runtime_error("invalid finite metric:\n" + metric.report.summary());
    PointSpace space = PointSpace::finite_metric(metric.n, std::move(metric.dist), config.p);
    std::vector<Point> points;
    points.reserve(metric.n);
    for (int i = 0; i < metric.n; ++i) points.push_back(index_point(i));
    return {std::move(space), std::move(points), std::nullopt};
  }

  std::vector<Point> points;
  int dim = 0;
  std::optional<Mixture> mixture;
  if (config.dataset == "mixture") {
    mixture = gen_mixture(config.mixture);
    points = mixture->points;
    dim = config.mixture.dim;
  } else {
    LoadedPoints loaded = load_points_csv(config.dataset);
    points = std::move(loaded.points);
    dim = loaded.dim;
  }
  PointSpace space = config.space_kind == "kmeans"
                         ? PointSpace::kmeans(dim)
                         : PointSpace::euclidean(dim, config.norm, config.p);
  return {std::move(space), std::move(points), std::move(mixture)};
}

std::vector<std::pair<int, double>> cost_curve(const GreedyTrace& trace) {
  std::vector<std::pair<int, double>> curve;
  std::vector<Point> seen;
  auto distinct_add = [&]( const Point& c) {
    for (const Point& s : seen)
      if (s == c) return;
    seen.push_back(c);
  };
  for (const Point& c : trace.initial_centers) distinct_add(c);
  if (trace.initial_cost) curve.emplace_back(static_cast<int>(seen.size()), *trace.initial_cost);
  for (const RoundRecord& r : trace.rounds) {
    if (r.skipped) continue;
    distinct_add(r.chosen_center);
    curve.emplace_back(static_cast<int>(seen.size()), r.cost_after.value());
  }
  return curve;
}

namespace {

GreedyTrace run_baseline_kmeanspp(const PointSpace& space, const std::vector<Point>& X,
                                  const AlgorithmSpec& algo, std::uint64_t seed) {
  RngStream rng = RngStream(seed).child("kmeanspp");
  SeedTrace seeded = kmeanspp_seed_trace(space, X, algo.t, rng);
  GreedyTrace trace;
  trace.selector = "kmeanspp";
  trace.seed = seed;
  trace.dataset_fingerprint = fingerprint(X);
  for (std::size_t i = 0; i < seeded.centers.size(); ++i) {
    RoundRecord rec;
    rec.chosen_center = seeded.centers[i];
    rec.cost_after = seeded.costs[i];
    rec.candidate_count = 1;
    trace.rounds.push_back(std::move(rec));
  }
  trace.final_centers = seeded.centers;
  return trace;
}

RunRecord execute_run(const PointSpace& space, const std::vector<Point>& X,
                      const AlgorithmSpec& algo, int repeat, std::uint64_t base_seed) {
  RunRecord rec;
  rec.algorithm = algo.name;
  rec.repeat = repeat;
  rec.seed = run_seed(base_seed, algo.name, repeat);
  auto start = std::chrono::steady_clock::now();
  try {
    GreedyTrace trace;
    if (algo.baseline_kmeanspp) {
      trace = run_baseline_kmeanspp(space, X, algo, rec.seed);
    } else {
      GreedyConfig gc;
      gc.rounds = algo.t;
      gc.tau = algo.tau;
      gc.selector = algo.selector;
      gc.seed = rec.seed;
      switch (algo.c0_policy) {
        case AlgorithmSpec::C0Policy::empty:
          break;
        case AlgorithmSpec::C0Policy::kmeanspp: {
          RngStream c0_rng = RngStream(rec.seed).child("c0");
          gc.initial_centers = kmeanspp_seed(space, X, algo.c0_count, c0_rng);
          break;
        }
        case AlgorithmSpec::C0Policy::provided:
          gc.initial_centers = algo.c0_points;
          break;
      }
      trace = run_greedy(space, X, gc);
    }
    rec.final_cost = trace.final_cost();
    rec.curve = cost_curve(trace);
    rec.distinct_centers = rec.curve.empty() ? 0 : rec.curve.back().first;
    rec.trace_fingerprint = trace.trace_fingerprint();
    rec.trace = std::move(trace);
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();
  return rec;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool wants_metric(const ExperimentConfig& config, const char* name) {
  for (const auto& m : config.metrics)
    if (m == name) return true;
  return false;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, resolve_dataset(config));
}

RunResult run_experiment(const ExperimentConfig& config, const ResolvedDataset& data) {
  const long n_jobs = static_cast<long>(config.algorithms.size()) * config.repeats;
  RunResult result;
  result.runs.resize(n_jobs);

  std::atomic<long> next{0};
  auto worker = [&]() {
    for (;;) {
      long job = next.fetch_add(1);
      if (job >= n_jobs) return;
      const AlgorithmSpec& algo = config.algorithms[job / config.repeats];
      int repeat = static_cast<int>(job % config.repeats);
      result.runs[job] = execute_run(data.space, data.points, algo, repeat, config.seed);
    }
  };
  int workers = std::clamp<int>(config.threads, 1, static_cast<int>(n_jobs));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& run : result.runs) result.any_failed = result.any_failed || run.failed;

  for (const AlgorithmSpec& algo : config.algorithms) {
    std::vector<double> finals;
    for (const auto& run : result.runs)
      if (run.algorithm == algo.name && !run.failed) finals.push_back(run.final_cost);
    RunResult::Aggregate agg;
    agg.algorithm = algo.name;
    agg.median_cost = median(finals);
    agg.min_cost = finals.empty() ? std::numeric_limits<double>::quiet_NaN()
                                  : *std::min_element(finals.begin(), finals.end());
    result.aggregates.push_back(agg);
  }
  for (const auto& a : result.aggregates)
    for (const auto& b : result.aggregates) {
      if (a.algorithm == b.algorithm) continue;
      RunResult::Ratio ratio;
      ratio.numerator = a.algorithm;
      ratio.denominator = b.algorithm;
      ratio.median_ratio = a.median_cost / b.median_cost;
      ratio.min_ratio = a.min_cost / b.min_cost;
      result.ratios.push_back(ratio);
    }
  return result;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) { return std::stoull(s, nullptr, 16); }

ordered_json point_to_json(const Point& pt) {
  if (pt.is_index()) return pt.index;
  return ordered_json(pt.coords);
}

Point point_from_json(const ordered_json& j) {
  if (j.is_number_integer()) return index_point(j.get<int>());
  return coord_point(j.get<std::vector<double>>());
}

}  // namespace

std::string result_json(const ExperimentConfig& config, const RunResult& result) {
  ordered_json root;
  root["schema"] = 1;
  root["seed"] = hex64(config.seed);
  root["dataset"] = config.dataset;
  root["space"] = config.space_kind;
  root["repeats"] = config.repeats;
  ordered_json names = ordered_json::array();
  for (const auto& algo : config.algorithms) names.push_back(algo.name);
  root["algorithms"] = names;

  ordered_json runs = ordered_json::array();
  const bool with_curve = wants_metric(config, "cost_curve");
  for (const auto& run : result.runs) {
    ordered_json j;
    j["algorithm"] = run.algorithm;
    j["repeat"] = run.repeat;
    j["seed"] = hex64(run.seed);
    j["failed"] = run.failed;
    if (run.failed) {
      j["error"] = run.error;
    } else {
      j["final_cost"] = run.final_cost;
      j["distinct_centers"] = run.distinct_centers;
      j["trace_fingerprint"] = hex64(run.trace_fingerprint);
      if (with_curve) {
        ordered_json curve = ordered_json::array();
        for (auto [centers, cost_value] : run.curve)
          curve.push_back(ordered_json::array({centers, cost_value}));
        j["curve"] = curve;
      }
    }
    runs.push_back(std::move(j));
  }
  root["runs"] = runs;

  if (wants_metric(config, "median_cost") || wants_metric(config, "min_cost")) {
    ordered_json aggs = ordered_json::array();
    for (const auto& agg : result.aggregates) {
      ordered_json j;
      j["algorithm"] = agg.algorithm;
      if (wants_metric(config, "median_cost")) j["median_cost"] = agg.median_cost;
      if (wants_metric(config, "min_cost")) j["min_cost"] = agg.min_cost;
      aggs.push_back(std::move(j));
    }
    root["aggregates"] = aggs;
  }
  if (wants_metric(config, "ratios")) {
    ordered_json ratios = ordered_json::array();
    for (const auto& r : result.ratios) {
      ordered_json j;
      j["numerator"] = r.numerator;
      j["denominator"] = r.denominator;
      j["median_ratio"] = r.median_ratio;
      j["min_ratio"] = r.min_ratio;
      ratios.push_back(std::move(j));
    }
    root["ratios"] = ratios;
  }
  return root.dump(2) + "\n";
}

std::string curve_csv(const RunResult& result) {
  std::ostringstream os;
  os.precision(17);
  os << "algorithm,repeat,centers,cost\n";
  for (const auto& run : result.runs) {
    if (run.failed) continue;
    for (auto [centers, cost_value] : run.curve)
      os << run.algorithm << "," << run.repeat << "," << centers << "," << cost_value << "\n";
  }
  return os.str();
}

std::string trace_jsonl(const GreedyTrace& trace) {
  std::ostringstream os;
  ordered_json header;
  header["round"] = 0;
  header["selector"] = trace.selector;
  header["seed"] = hex64(trace.seed);
  header["dataset_fingerprint"] = hex64(trace.dataset_fingerprint);
  ordered_json c0 = ordered_json::array();
  for (const Point& c : trace.initial_centers) c0.push_back(point_to_json(c));
  header["initial_centers"] = c0;
  if (trace.initial_cost) header["cost"] = *trace.initial_cost;
  os << header.dump() << "\n";

  for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
    const RoundRecord& r = trace.rounds[i];
    ordered_json j;
    j["round"] = i + 1;
    if (r.cost_after) j["cost"] = *r.cost_after;
    if (!r.skipped) j["center"] = point_to_json(r.chosen_center);
    j["candidates"] = r.candidate_count;
    j["skipped"] = r.skipped;
    j["rng"] = hex64(r.selector_rng_fingerprint);
    if (r.condition_certificate) j["cert"] = *r.condition_certificate;
    os << j.dump() << "\n";
  }
  return os.str();
}

GreedyTrace parse_trace_jsonl(const std::string& text) {
  GreedyTrace trace;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ordered_json j = ordered_json::parse(line);
    if (!have_header) {
      if (j.at("round").get<int>() != 0)
        throw std::runtime_error("trace: missing round-0 header record");
      trace.selector = j.at("selector").get<std::string>();
      trace.seed = parse_hex64(j.at("seed").get<std::string>());
      trace.dataset_fingerprint = parse_hex64(j.at("dataset_fingerprint").get<std::string>());
      for (const auto& c : j.at("initial_centers")) trace.initial_centers.push_back(point_from_json(c));
      if (j.contains("cost")) trace.initial_cost = j["cost"].get<double>();
      trace.final_centers = trace.initial_centers;
      have_header = true;
      continue;
    }
    RoundRecord rec;
    rec.skipped = j.at("skipped").get<bool>();
    if (j.contains("cost")) rec.cost_after = j["cost"].get<double>();
    rec.candidate_count = j.at("candidates").get<long>();
    rec.selector_rng_fingerprint = parse_hex64(j.at("rng").get<std::string>());
    if (!rec.skipped) {
      rec.chosen_center = point_from_json(j.at("center"));
      trace.final_centers.push_back(rec.chosen_center);
    }
    if (j.contains("cert")) rec.condition_certificate = j["cert"].get<std::vector<double>>();
    trace.rounds.push_back(std::move(rec));
  }
  if (!have_header) throw std::runtime_error("trace: empty file");
  return trace;
}

GreedyTrace load_trace_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_trace_jsonl(os.str());
}

void write_run_result(const ExperimentConfig& config, const RunResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(config.output);
  {
    std::ofstream os(fs::path(config.output) / "result.json", std::ios::binary);
    os << result_json(config, result);
  }
  if (wants_metric(config, "cost_curve")) {
    std::ofstream os(fs::path(config.output) / "curve.csv", std::ios::binary);
    os << curve_csv(result);
  }
  if (config.emit_traces) {
    for (const auto& run : result.runs) {
      if (run.failed) continue;
      std::ostringstream name;
      name << "trace_" << run.algorithm << "_" << run.repeat << ".jsonl";
      std::ofstream os(fs::path(config.output) / name.str(), std::ios::binary);
      os << trace_jsonl(run.trace);
    }
  }
}

}  // namespace gkm
