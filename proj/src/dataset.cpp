#include "gkm/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gkm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  std::size_t lo = s.find_first_not_of(" \t");
  if (lo == std::string::npos) return false;
  std::size_t hi = s.find_last_not_of(" \t");
  try {
    std::size_t used = 0;
    out = std::stod(s.substr(lo, hi - lo + 1), &used);
    return used == hi - lo + 1;
  } catch (...) {
    return false;
  }
}

std::vector<std::vector<double>> load_numeric_rows(const std::string& path,
                                                   bool allow_header_skip) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    std::vector<double> row;
    row.reserve(fields.size());
    bool ok = true;
    for (const auto& f : fields) {
      double v;
      if (!parse_double(f, v)) {
        ok = false;
        break;
      }
      row.push_back(v);
    }
    if (!ok) {
      if (first_content && allow_header_skip) {
        first_content = false;
        continue;  // header row
      }
      std::ostringstream os;
      os << path << ":" << line_no << ": cannot parse row";
      throw std::runtime_error(os.str());
    }
    first_content = false;
    if (!rows.empty() && rows.front().size() != row.size()) {
      std::ostringstream os;
      os << path << ":" << line_no << ": ragged row (" << row.size() << " columns, expected "
         << rows.front().size() << ")";
      throw std::runtime_error(os.str());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

LoadedPoints load_points_csv(const std::string& path) {
  auto rows = load_numeric_rows(path, /*allow_header_skip=*/true);
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");
  LoadedPoints out;
  out.dim = static_cast<int>(rows.front().size());
  out.points.reserve(rows.size());
  for (auto& row : rows) out.points.push_back(coord_point(std::move(row)));
  return out;
}

LoadedMetric load_metric_csv(const std::string& path) {
  auto rows = load_numeric_rows(path, /*allow_header_skip=*/false);
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");
  LoadedMetric out;
  out.report = validate_finite_metric(rows);  // throws on non-square input
  out.n = static_cast<int>(rows.size());
  out.dist.reserve(static_cast<std::size_t>(out.n) * out.n);
  for (const auto& row : rows)
    for (double v : row) out.dist.push_back(v);
  return out;
}

void write_points_csv(const std::string& path, const std::vector<Point>& points) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.precision(17);
  for (const Point& pt : points) {
    for (std::size_t i = 0; i < pt.coords.size(); ++i) {
      if (i) os << ",";
      os << pt.coords[i];
    }
    os << "\n";
  }
}

Mixture gen_mixture(const MixtureSpec& spec) {
  if (spec.k < 1 || spec.n_per_cluster < 1 || spec.dim < 1)
    throw std::invalid_argument("gen_mixture: k, n_per_cluster, dim must be positive");
  if (spec.spread <= 0.0) throw std::invalid_argument("gen_mixture: spread must be > 0");

  RngStream rng(spec.seed);
  Mixture mix;
  mix.planted_partition.assign(spec.k, {});
  for (int j = 0; j < spec.k; ++j) {
    RngStream center_rng = rng.child("center").child(static_cast<std::uint64_t>(j));
    std::vector<double> c(spec.dim);
    for (double& v : c) v = center_rng.uniform(-spec.center_box, spec.center_box);
    mix.generator_centers.push_back(coord_point(c));

    RngStream cluster_rng = rng.child("cluster").child(static_cast<std::uint64_t>(j));
    for (int i = 0; i < spec.n_per_cluster; ++i) {
      RngStream point_rng = cluster_rng.child(static_cast<std::uint64_t>(i));
      std::vector<double> x(spec.dim);
      for (int dcoord = 0; dcoord < spec.dim; ++dcoord)
        x[dcoord] = c[dcoord] + spec.spread * point_rng.gaussian();
      mix.planted_partition[j].push_back(static_cast<int>(mix.points.size()));
      mix.points.push_back(coord_point(std::move(x)));
    }
  }
  return mix;
}

ReferenceSolution planted_reference(const PointSpace& space, const Mixture& mixture) {
  std::vector<Point> centers;
  centers.reserve(mixture.generator_centers.size());
  if (space.is_kmeans()) {
    for (const auto& members : mixture.planted_partition) {
      std::vector<Point> pts;
      pts.reserve(members.size());
      for (int i : members) pts.push_back(mixture.points[i]);
      centers.push_back(mean_point(pts));
    }
  } else {
    centers = mixture.generator_centers;
  }
  return make_reference(space, mixture.points, std::move(centers));
}

}  // namespace gkm
