#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "gkm/rng.hpp"

namespace gkm {

enum class Norm { l2, l1, linf };

std::string norm_name(Norm n);
Norm parse_norm(const std::string& s);

/// A point of the ambient space: coordinates for Euclidean spaces, an index
/// into the distance matrix for finite metric spaces.
struct Point {
  std::vector<double> coords;
  int index = -1;

  bool is_index() const { return index >= 0; }
};

inline Point coord_point(std::vector<double> c) { return Point{std::move(c), -1}; }
inline Point index_point(int i) { return Point{{}, i}; }

bool operator==(const Point& a, const Point& b);

/// One violated finite-metric constraint.
struct MetricViolation {
  enum class Kind { negative_entry, nonzero_diagonal, asymmetry, triangle };
  Kind kind;
  int i = -1;
  int j = -1;
  int via = -1;  // intermediate index for triangle violations
  double lhs = 0.0;
  double rhs = 0.0;

  std::string describe() const;
};

struct ValidationReport {
  std::vector<MetricViolation> violations;

  bool valid() const { return violations.empty(); }
  std::string summary() const;
};

/// Full O(n^3) finite-metric check: nonnegative entries, zero diagonal,
/// symmetry, triangle inequality (with 1e-12 relative slack on triangles).
/// Throws std::invalid_argument on a non-square matrix.
ValidationReport validate_finite_metric(const std::vector<std::vector<double>>& rows);

/// The ambient space (X, Delta): either R^dim under an lp norm or a finite
/// metric given by an explicit distance matrix, together with the exponent p
/// of the cost kernel Delta(x,y) = D(x,y)^p and the normalization exponent q.
///
/// k-means is the special case (l2, p=2) with q = 1; every other space has
/// q = p. Copies are cheap (shared immutable payload).
class PointSpace {
 public:
  static PointSpace kmeans(int dim);
  static PointSpace euclidean(int dim, Norm norm, double p);
  /// dist is row-major n*n. Triangle validation is opt-in via
  /// validate_finite_metric; the constructor only checks shape basics.
  static PointSpace finite_metric(int n, std::vector<double> dist, double p);

  bool is_euclidean() const;
  bool is_kmeans() const;
  int dim() const;          // euclidean only
  int metric_size() const;  // finite metric only
  Norm norm() const;        // euclidean only
  double p() const;
  double q() const;

  /// Base distance D(a, b).
  double distance(const Point& a, const Point& b) const;
  /// Cost kernel Delta(a, b) = D(a, b)^p (direct squared norm for k-means).
  double delta(const Point& a, const Point& b) const;

  ValidationReport validate_metric() const;

  std::string describe() const;

  struct Impl;

 private:
  explicit PointSpace(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Uniform sample from the norm ball {z : ||z - center|| <= radius}.
/// l2 uses a normalized Gaussian direction with radius*u^(1/dim) length;
/// l1 rejection-samples from the enclosing cube; linf samples the cube.
/// Throws on finite-metric spaces.
Point norm_ball_sample(const PointSpace& space, const Point& center, double radius,
                       RngStream& rng);

/// Order-stable content hash of a point set (used to tie traces to datasets).
std::uint64_t fingerprint(const std::vector<Point>& points);

/// a <= b up to `rel` times the larger magnitude.
inline bool approx_le(double a, double b, double rel = 1e-9) {
  double scale = std::max(std::abs(a), std::abs(b));
  return a <= b + rel * scale;
}

inline bool approx_eq(double a, double b, double rel = 1e-9) {
  return approx_le(a, b, rel) && approx_le(b, a, rel);
}

}  // namespace gkm
