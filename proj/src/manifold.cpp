#include "blendfit/manifold.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

namespace blendfit {

namespace {

using Mat3 = Eigen::Matrix<double, 3, 3, Eigen::RowMajor>;
using MapMat3 = Eigen::Map<const Mat3>;
using Vec3 = Eigen::Vector3d;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_dim(const std::vector<double>& c, int want, const std::string& what) {
  if (static_cast<int>(c.size()) != want) {
    std::ostringstream msg;
    msg << what << ": expected " << want << " coordinates, got " << c.size();
    throw std::invalid_argument(msg.str());
  }
}

// Angle-axis rotation with series fallbacks below 1e-8 radians.
Mat3 rodrigues(const Vec3& omega) {
  const double theta = omega.norm();
  Mat3 hat;
  hat << 0.0, -omega.z(), omega.y(), omega.z(), 0.0, -omega.x(), -omega.y(), omega.x(), 0.0;
  double a, b;
  if (theta < 1e-8) {
    a = 1.0 - theta * theta / 6.0;
    b = 0.5 - theta * theta / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Mat3(Mat3::Identity() + a * hat + b * (hat * hat));
}

}  // namespace

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::euclidean:
      return "euclidean";
    case ManifoldKind::sphere2:
      return "sphere2";
    case ManifoldKind::so3:
      return "so3";
  }
  throw std::invalid_argument("unknown manifold kind");
}

ManifoldKind manifold_kind_from_string(const std::string& name) {
  if (name == "euclidean") return ManifoldKind::euclidean;
  if (name == "sphere2") return ManifoldKind::sphere2;
  if (name == "so3") return ManifoldKind::so3;
  throw std::invalid_argument("unknown manifold kind: " + name);
}

void check_descriptor(const ManifoldDescriptor& d) {
  switch (d.kind) {
    case ManifoldKind::euclidean:
      if (d.ambient_dim < 1) throw std::invalid_argument("euclidean dimension must be at least 1");
      return;
    case ManifoldKind::sphere2:
      if (d.ambient_dim != 3) throw std::invalid_argument("sphere2 requires ambient_dim 3");
      return;
    case ManifoldKind::so3:
      if (d.ambient_dim != 9) throw std::invalid_argument("so3 requires ambient_dim 9");
      return;
  }
  throw std::invalid_argument("unknown manifold kind");
}

double Manifold::inner(const TangentVector& u, const TangentVector& v) const {
  return dot(u.coords, v.coords);
}

double Manifold::norm(const TangentVector& v) const { return std::sqrt(inner(v, v)); }

double Manifold::dist(const Point& x, const Point& y) const { return norm(log(x, y)); }

void Manifold::require_point(const Point& x, const std::string& what) const {
  check_dim(x.coords, ambient_dim(), what);
  for (double c : x.coords) {
    if (!std::isfinite(c)) throw std::invalid_argument(what + ": non-finite coordinate");
  }
  const double defect = point_defect(x);
  if (!(defect <= point_tolerance())) {
    std::ostringstream msg;
    msg << what << ": not on " << to_string(kind()) << " (defect " << defect << ", tolerance "
        << point_tolerance() << ")";
    throw std::invalid_argument(msg.str());
  }
}

Euclidean::Euclidean(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("euclidean dimension must be at least 1");
}

Point Euclidean::exp(const Point& x, const TangentVector& v) const {
  check_dim(x.coords, dim_, "exp point");
  check_dim(v.coords, dim_, "exp tangent");
  Point out = x;
  for (int i = 0; i < dim_; ++i) out.coords[i] += v.coords[i];
  return out;
}

TangentVector Euclidean::log(const Point& x, const Point& y) const {
  check_dim(x.coords, dim_, "log base");
  check_dim(y.coords, dim_, "log target");
  TangentVector v{x, y.coords};
  for (int i = 0; i < dim_; ++i) v.coords[i] -= x.coords[i];
  return v;
}

double Euclidean::point_defect(const Point&) const { return 0.0; }

double Euclidean::tangent_defect(const TangentVector&) const { return 0.0; }

Point Sphere2::exp(const Point& x, const TangentVector& v) const {
  check_dim(x.coords, 3, "exp point");
  check_dim(v.coords, 3, "exp tangent");
  const double theta = std::sqrt(dot(v.coords, v.coords));
  if (theta == 0.0) return x;
  double c, s_over;
  if (theta < 1e-8) {
    c = 1.0 - theta * theta / 2.0;
    s_over = 1.0 - theta * theta / 6.0;
  } else {
    c = std::cos(theta);
    s_over = std::sin(theta) / theta;
  }
  Point out;
  out.coords.resize(3);
  for (int i = 0; i < 3; ++i) out.coords[i] = c * x.coords[i] + s_over * v.coords[i];
  return out;
}

TangentVector Sphere2::log(const Point& x, const Point& y) const {
  check_dim(x.coords, 3, "log base");
  check_dim(y.coords, 3, "log target");
  TangentVector v{x, {0.0, 0.0, 0.0}};
  if (x.coords == y.coords) return v;
  const double c = dot(x.coords, y.coords);
  if (c <= -1.0 + 1e-9) {
    throw WellPosednessError("sphere2 log undefined: points are antipodal or nearly so");
  }
  std::vector<double> u(3);
  for (int i = 0; i < 3; ++i) u[i] = y.coords[i] - c * x.coords[i];
  const double nu = std::sqrt(dot(u, u));
  if (nu == 0.0) return v;
  const double theta = std::atan2(nu, c);
  const double scale = theta / nu;
  for (int i = 0; i < 3; ++i) v.coords[i] = scale * u[i];
  return v;
}

double Sphere2::point_defect(const Point& x) const {
  if (static_cast<int>(x.coords.size()) != 3) return std::numeric_limits<double>::infinity();
  return std::abs(std::sqrt(dot(x.coords, x.coords)) - 1.0);
}

double Sphere2::tangent_defect(const TangentVector& v) const {
  if (v.coords.size() != 3 || v.base.coords.size() != 3) {
    return std::numeric_limits<double>::infinity();
  }
  return std::abs(dot(v.coords, v.base.coords));
}

Point SO3::exp(const Point& x, const TangentVector& v) const {
  check_dim(x.coords, 9, "exp point");
  check_dim(v.coords, 9, "exp tangent");
  const MapMat3 B(x.coords.data());
  const MapMat3 V(v.coords.data());
  const Mat3 omega_mat = B.transpose() * V;
  // Extract the rotation vector from the skew part; symmetrizing tolerates
  // tangent coordinates that drift slightly off the constraint surface.
  Vec3 omega(0.5 * (omega_mat(2, 1) - omega_mat(1, 2)), 0.5 * (omega_mat(0, 2) - omega_mat(2, 0)),
             0.5 * (omega_mat(1, 0) - omega_mat(0, 1)));
  if (omega.norm() == 0.0) return x;
  const Mat3 R = rodrigues(omega);
  const Mat3 out = B * R;
  Point p;
  p.coords.assign(out.data(), out.data() + 9);
  return p;
}

TangentVector SO3::log(const Point& x, const Point& y) const {
  check_dim(x.coords, 9, "log base");
  check_dim(y.coords, 9, "log target");
  TangentVector v{x, std::vector<double>(9, 0.0)};
  if (x.coords == y.coords) return v;
  const MapMat3 B(x.coords.data());
  const MapMat3 Q(y.coords.data());
  const Mat3 M = B.transpose() * Q;
  Vec3 axis(0.5 * (M(2, 1) - M(1, 2)), 0.5 * (M(0, 2) - M(2, 0)), 0.5 * (M(1, 0) - M(0, 1)));
  const double s = axis.norm();
  const double c = 0.5 * (M.trace() - 1.0);
  const double theta = std::atan2(s, c);
  if (theta >= M_PI - 1e-6) {
    throw WellPosednessError("so3 log undefined: rotation angle within 1e-6 of a half turn");
  }
  Mat3 antisym = 0.5 * (M - M.transpose());
  Mat3 omega_mat;
  if (theta < 1e-8) {
    omega_mat = antisym;
  } else {
    omega_mat = (theta / s) * antisym;
  }
  const Mat3 V = B * omega_mat;
  v.coords.assign(V.data(), V.data() + 9);
  return v;
}

double SO3::inner(const TangentVector& u, const TangentVector& v) const {
  return 0.5 * dot(u.coords, v.coords);
}

double SO3::point_defect(const Point& x) const {
  if (static_cast<int>(x.coords.size()) != 9) return std::numeric_limits<double>::infinity();
  const MapMat3 B(x.coords.data());
  if (B.determinant() <= 0.0) return std::numeric_limits<double>::infinity();
  return (B.transpose() * B - Mat3::Identity()).norm();
}

double SO3::tangent_defect(const TangentVector& v) const {
  if (v.coords.size() != 9 || v.base.coords.size() != 9) {
    return std::numeric_limits<double>::infinity();
  }
  const MapMat3 B(v.base.coords.data());
  const MapMat3 V(v.coords.data());
  const Mat3 omega_mat = B.transpose() * V;
  return (omega_mat + omega_mat.transpose()).norm();
}

std::unique_ptr<Manifold> make_manifold(const ManifoldDescriptor& d) {
  check_descriptor(d);
  switch (d.kind) {
    case ManifoldKind::euclidean:
      return std::make_unique<Euclidean>(d.ambient_dim);
    case ManifoldKind::sphere2:
      return std::make_unique<Sphere2>();
    case ManifoldKind::so3:
      return std::make_unique<SO3>();
  }
  throw std::invalid_argument("unknown manifold kind");
}

Point weighted_mean_two(const Manifold& M, const Point& x, const Point& y, double a) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw std::invalid_argument("weighted_mean_two: weight outside [0, 1]");
  }
  if (a == 0.0) return x;
  if (a == 1.0) return y;
  TangentVector v = M.log(x, y);
  for (double& c : v.coords) c *= a;
  return M.exp(x, v);
}

}  // namespace blendfit
