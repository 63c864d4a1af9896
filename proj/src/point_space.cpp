#include "gkm/point_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace gkm {

std::string norm_name(Norm n) {
  switch (n) {
    case Norm::l2: return "l2";
    case Norm::l1: return "l1";
    case Norm::linf: return "linf";
  }
  return "?";
}

Norm parse_norm(const std::string& s) {
  if (s == "l2") return Norm::l2;
  if (s == "l1") return Norm::l1;
  if (s == "linf") return Norm::linf;
  throw std::invalid_argument("unknown norm: " + s);
}

bool operator==(const Point& a, const Point& b) {
  return a.index == b.index && a.coords == b.coords;
}

struct PointSpace::Impl {
  bool euclidean = true;
  int dim = 0;
  Norm norm = Norm::l2;
  int n = 0;
  std::vector<double> dist;  // row-major n*n
  double p = 2.0;
  double q = 1.0;
  bool kmeans = false;
};

PointSpace PointSpace::kmeans(int dim) {
  if (dim < 1) throw std::invalid_argument("kmeans: dim must be positive");
  auto impl = std::make_shared<Impl>();
  impl->euclidean = true;
  impl->dim = dim;
  impl->norm = Norm::l2;
  impl->p = 2.0;
  impl->q = 1.0;
  impl->kmeans = true;
  return PointSpace(std::move(impl));
}

PointSpace PointSpace::euclidean(int dim, Norm norm, double p) {
  if (dim < 1) throw std::invalid_argument("euclidean: dim must be positive");
  if (p < 1.0) throw std::invalid_argument("euclidean: p must be >= 1");
  if (norm == Norm::l2 && p == 2.0) return kmeans(dim);
  auto impl = std::make_shared<Impl>();
  impl->euclidean = true;
  impl->dim = dim;
  impl->norm = norm;
  impl->p = p;
  impl->q = p;
  impl->kmeans = false;
  return PointSpace(std::move(impl));
}

PointSpace PointSpace::finite_metric(int n, std::vector<double> dist, double p) {
  if (n < 1) throw std::invalid_argument("finite_metric: n must be positive");
  if (static_cast<std::size_t>(n) * n != dist.size())
    throw std::invalid_argument("finite_metric: dist must be n*n");
  if (p < 1.0) throw std::invalid_argument("finite_metric: p must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->euclidean = false;
  impl->n = n;
  impl->dist = std::move(dist);
  impl->p = p;
  impl->q = p;
  impl->kmeans = false;
  return PointSpace(std::move(impl));
}

bool PointSpace::is_euclidean() const { return impl_->euclidean; }
bool PointSpace::is_kmeans() const { return impl_->kmeans; }

int PointSpace::dim() const {
  if (!impl_->euclidean) throw std::logic_error("dim(): finite metric space");
  return impl_->dim;
}

int PointSpace::metric_size() const {
  if (impl_->euclidean) throw std::logic_error("metric_size(): euclidean space");
  return impl_->n;
}

Norm PointSpace::norm() const {
  if (!impl_->euclidean) throw std::logic_error("norm(): finite metric space");
  return impl_->norm;
}

double PointSpace::p() const { return impl_->p; }
double PointSpace::q() const { return impl_->q; }

namespace {

void check_coords(const PointSpace::Impl& impl, const Point& pt) {
  if (pt.is_index() || static_cast<int>(pt.coords.size()) != impl.dim)
    throw std::invalid_argument("invalid point for euclidean space");
}

void check_index(const PointSpace::Impl& impl, const Point& pt) {
  if (!pt.is_index() || pt.index >= impl.n)
    throw std::invalid_argument("invalid point for finite metric space");
}

double squared_l2(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    double d = a.coords[i] - b.coords[i];
    s += d * d;
  }
  return s;
}

}  // namespace

double PointSpace::distance(const Point& a, const Point& b) const {
  const Impl& impl = *impl_;
  if (!impl.euclidean) {
    check_index(impl, a);
    check_index(impl, b);
    return impl.dist[static_cast<std::size_t>(a.index) * impl.n + b.index];
  }
  check_coords(impl, a);
  check_coords(impl, b);
  switch (impl.norm) {
    case Norm::l2:
      return std::sqrt(squared_l2(a, b));
    case Norm::l1: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.coords.size(); ++i) s += std::abs(a.coords[i] - b.coords[i]);
      return s;
    }
    case Norm::linf: {
      double m = 0.0;
      for (std::size_t i = 0; i < a.coords.size(); ++i)
        m = std::max(m, std::abs(a.coords[i] - b.coords[i]));
      return m;
    }
  }
  return 0.0;
}

double PointSpace::delta(const Point& a, const Point& b) const {
  const Impl& impl = *impl_;
  if (impl.euclidean && impl.norm == Norm::l2 && impl.p == 2.0) {
    check_coords(impl, a);
    check_coords(impl, b);
    return squared_l2(a, b);
  }
  double d = distance(a, b);
  if (impl.p == 1.0) return d;
  if (impl.p == 2.0) return d * d;
  return std::pow(d, impl.p);
}

std::string MetricViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::negative_entry:
      os << "negative entry at (" << i << "," << j << "): " << lhs;
      break;
    case Kind::nonzero_diagonal:
      os << "nonzero diagonal at (" << i << "," << i << "): " << lhs;
      break;
    case Kind::asymmetry:
      os << "symmetry violation at (" << i << "," << j << "): " << lhs << " vs " << rhs;
      break;
    case Kind::triangle:
      os << "triangle violation (" << i << "," << j << ") via " << via << ": " << lhs << " > "
         << rhs;
      break;
  }
  return os.str();
}

std::string ValidationReport::summary() const {
  if (valid()) return "valid";
  std::ostringstream os;
  os << violations.size() << " violation(s)";
  for (const auto& v : violations) os << "\n  " << v.describe();
  return os.str();
}

ValidationReport validate_finite_metric(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  for (const auto& r : rows)
    if (static_cast<int>(r.size()) != n)
      throw std::invalid_argument("validate_finite_metric: matrix is not square");

  ValidationReport report;
  double scale = 0.0;
  for (const auto& r : rows)
    for (double v : r) scale = std::max(scale, std::abs(v));

  for (int i = 0; i < n; ++i) {
    if (rows[i][i] != 0.0)
      report.violations.push_back(
          {MetricViolation::Kind::nonzero_diagonal, i, i, -1, rows[i][i], 0.0});
    for (int j = 0; j < n; ++j) {
      if (rows[i][j] < 0.0)
        report.violations.push_back(
            {MetricViolation::Kind::negative_entry, i, j, -1, rows[i][j], 0.0});
      if (j > i && rows[i][j] != rows[j][i])
        report.violations.push_back(
            {MetricViolation::Kind::asymmetry, i, j, -1, rows[i][j], rows[j][i]});
    }
  }
  const double slack = 1e-12 * scale;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j || i == j) continue;
        double lhs = rows[i][j];
        double rhs = rows[i][k] + rows[k][j];
        if (lhs > rhs + slack)
          report.violations.push_back({MetricViolation::Kind::triangle, i, j, k, lhs, rhs});
      }
  return report;
}

ValidationReport PointSpace::validate_metric() const {
  if (impl_->euclidean) throw std::logic_error("validate_metric(): euclidean space");
  const int n = impl_->n;
  std::vector<std::vector<double>> rows(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rows[i][j] = impl_->dist[static_cast<std::size_t>(i) * n + j];
  return validate_finite_metric(rows);
}

std::string PointSpace::describe() const {
  std::ostringstream os;
  if (impl_->kmeans) {
    os << "kmeans(dim=" << impl_->dim << ")";
  } else if (impl_->euclidean) {
    os << "euclidean(dim=" << impl_->dim << ", norm=" << norm_name(impl_->norm)
       << ", p=" << impl_->p << ")";
  } else {
    os << "finite_metric(n=" << impl_->n << ", p=" << impl_->p << ")";
  }
  return os.str();
}

Point norm_ball_sample(const PointSpace& space, const Point& center, double radius,
                       RngStream& rng) {
  if (!space.is_euclidean())
    throw std::invalid_argument("norm_ball_sample: unsupported for finite metric spaces");
  if (radius < 0.0) throw std::invalid_argument("norm_ball_sample: radius must be >= 0");
  const int d = space.dim();
  if (static_cast<int>(center.coords.size()) != d)
    throw std::invalid_argument("norm_ball_sample: center dimension mismatch");
  if (radius == 0.0) return center;

  Point out = center;
  switch (space.norm()) {
    case Norm::l2: {
      std::vector<double> dir(d);
      double nrm = 0.0;
      do {
        nrm = 0.0;
        for (int i = 0; i < d; ++i) {
          dir[i] = rng.gaussian();
          nrm += dir[i] * dir[i];
        }
        nrm = std::sqrt(nrm);
      } while (nrm == 0.0);
      double len = radius * std::pow(rng.uniform(), 1.0 / d);
      for (int i = 0; i < d; ++i) out.coords[i] = center.coords[i] + dir[i] * (len / nrm);
      break;
    }
    case Norm::linf: {
      for (int i = 0; i < d; ++i) out.coords[i] = center.coords[i] + radius * rng.uniform(-1.0, 1.0);
      break;
    }
    case Norm::l1: {
      // Rejection from the enclosing cube; acceptance decays as 1/d!.
      std::vector<double> off(d);
      for (;;) {
        double sum = 0.0;
        for (int i = 0; i < d; ++i) {
          off[i] = radius * rng.uniform(-1.0, 1.0);
          sum += std::abs(off[i]);
        }
        if (sum <= radius) break;
      }
      for (int i = 0; i < d; ++i) out.coords[i] = center.coords[i] + off[i];
      break;
    }
  }
  return out;
}

std::uint64_t fingerprint(const std::vector<Point>& points) {
  std::uint64_t h = fnv1a("points");
  for (const Point& pt : points) {
    h = hash_combine(h, static_cast<std::uint64_t>(pt.index + 1));
    for (double c : pt.coords) h = hash_combine(h, std::bit_cast<std::uint64_t>(c));
  }
  return h;
}

}  // namespace gkm
