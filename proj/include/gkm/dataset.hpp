#pragma once

#include <string>
#include <vector>

#include "gkm/cost.hpp"
#include "gkm/point_space.hpp"
#include "gkm/reference.hpp"
#include "gkm/rng.hpp"

namespace gkm {

struct LoadedPoints {
  int dim = 0;
  std::vector<Point> points;
};

/// One point per row, dim columns, optional non-numeric header row.
/// Throws std::runtime_error with the line number on ragged/unparseable rows.
LoadedPoints load_points_csv(const std::string& path);

struct LoadedMetric {
  int n = 0;
  std::vector<double> dist;  // row-major
  ValidationReport report;
};

/// n rows of n comma-separated reals; the validation report is always
/// computed, acceptance of invalid metrics is the caller's call.
LoadedMetric load_metric_csv(const std::string& path);

void write_points_csv(const std::string& path, const std::vector<Point>& points);

/// Synthetic Gaussian mixture: k centers uniform in [-center_box, center_box]^dim,
/// n_per_cluster isotropic Gaussian points per center.
struct MixtureSpec {
  int k = 1;
  int n_per_cluster = 1;
  int dim = 1;
  double center_box = 10.0;
  double spread = 1.0;
  std::uint64_t seed = 0;
};

struct Mixture {
  std::vector<Point> points;
  std::vector<Point> generator_centers;  // the drawn centers
  Partition planted_partition;           // by generation order
};

Mixture gen_mixture(const MixtureSpec& spec);

/// The planted reference solution: per-planted-cluster empirical means for
/// k-means spaces, the generator centers otherwise. The partition stored in
/// the result is assign(X, centers), which can differ from the planted one
/// when clusters overlap.
ReferenceSolution planted_reference(const PointSpace& space, const Mixture& mixture);

}  // namespace gkm
