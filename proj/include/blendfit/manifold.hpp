#pragma once

#include <atomic>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace blendfit {

// Raised when a logarithm (or anything built on one) is requested for a point
// pair at or too close to the cut locus: a near-antipodal sphere pair, or a
// relative rotation within 1e-6 of a half turn.
class WellPosednessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Manifold point in embedded coordinates.
//   euclidean: r entries
//   sphere2:   unit 3-vector
//   so3:       row-major 3x3 rotation matrix (9 entries)
struct Point {
  std::vector<double> coords;
};

// Tangent vector at `base`, stored in the same ambient coordinates as the
// point. For so3 the matrix form V satisfies: base^T V is skew-symmetric.
struct TangentVector {
  Point base;
  std::vector<double> coords;
};

enum class ManifoldKind { euclidean, sphere2, so3 };

std::string to_string(ManifoldKind kind);
ManifoldKind manifold_kind_from_string(const std::string& name);

struct ManifoldDescriptor {
  ManifoldKind kind = ManifoldKind::euclidean;
  int ambient_dim = 1;
};

// Throws std::invalid_argument unless kind and ambient_dim are consistent.
void check_descriptor(const ManifoldDescriptor& d);

// Exponential/logarithm interface used by all fitting code. Implementations
// are stateless: every operation is a pure function of its arguments.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual ManifoldKind kind() const = 0;
  virtual int ambient_dim() const = 0;
  ManifoldDescriptor descriptor() const { return {kind(), ambient_dim()}; }

  // Geodesic from x with initial velocity v, followed for unit time.
  // exp(x, 0) returns x bit for bit.
  virtual Point exp(const Point& x, const TangentVector& v) const = 0;

  // Inverse of exp: the tangent vector at x pointing to y whose norm is the
  // geodesic distance. log(x, x) is exactly zero.
  virtual TangentVector log(const Point& x, const Point& y) const = 0;

  // Metric on tangent coordinates. Defaults to the ambient dot product; so3
  // halves it so that distance equals the rotation angle.
  virtual double inner(const TangentVector& u, const TangentVector& v) const;

  double norm(const TangentVector& v) const;

  // Geodesic distance, always computed as the norm of the logarithm.
  double dist(const Point& x, const Point& y) const;

  // Residual of the membership constraint (exactly 0 for euclidean). An
  // orientation-reversing matrix handed to so3 yields +infinity.
  virtual double point_defect(const Point& x) const = 0;

  // Residual of the tangency constraint at v.base.
  virtual double tangent_defect(const TangentVector& v) const = 0;

  // Largest point_defect accepted for points entering fits or data files.
  virtual double point_tolerance() const = 0;

  // Dimension plus membership check; `what` names the offending value in the
  // std::invalid_argument message.
  void require_point(const Point& x, const std::string& what) const;
};

class Euclidean final : public Manifold {
 public:
  explicit Euclidean(int dim);
  ManifoldKind kind() const override { return ManifoldKind::euclidean; }
  int ambient_dim() const override { return dim_; }
  Point exp(const Point& x, const TangentVector& v) const override;
  TangentVector log(const Point& x, const Point& y) const override;
  double point_defect(const Point& x) const override;
  double tangent_defect(const TangentVector& v) const override;
  double point_tolerance() const override { return 0.0; }

 private:
  int dim_;
};

class Sphere2 final : public Manifold {
 public:
  ManifoldKind kind() const override { return ManifoldKind::sphere2; }
  int ambient_dim() const override { return 3; }
  Point exp(const Point& x, const TangentVector& v) const override;
  TangentVector log(const Point& x, const Point& y) const override;
  double point_defect(const Point& x) const override;
  double tangent_defect(const TangentVector& v) const override;
  double point_tolerance() const override { return 1e-12; }
};

class SO3 final : public Manifold {
 public:
  ManifoldKind kind() const override { return ManifoldKind::so3; }
  int ambient_dim() const override { return 9; }
  Point exp(const Point& x, const TangentVector& v) const override;
  TangentVector log(const Point& x, const Point& y) const override;
  double inner(const TangentVector& u, const TangentVector& v) const override;
  double point_defect(const Point& x) const override;
  double tangent_defect(const TangentVector& v) const override;
  double point_tolerance() const override { return 1e-10; }
};

// Pass-through wrapper counting exp and log invocations. Used to verify the
// evaluation cost contract (3 exp + 1 log per curve evaluation).
class CountingManifold final : public Manifold {
 public:
  explicit CountingManifold(const Manifold& wrapped) : wrapped_(&wrapped) {}

  ManifoldKind kind() const override { return wrapped_->kind(); }
  int ambient_dim() const override { return wrapped_->ambient_dim(); }
  Point exp(const Point& x, const TangentVector& v) const override {
    ++exp_calls_;
    return wrapped_->exp(x, v);
  }
  TangentVector log(const Point& x, const Point& y) const override {
    ++log_calls_;
    return wrapped_->log(x, y);
  }
  double inner(const TangentVector& u, const TangentVector& v) const override {
    return wrapped_->inner(u, v);
  }
  double point_defect(const Point& x) const override { return wrapped_->point_defect(x); }
  double tangent_defect(const TangentVector& v) const override {
    return wrapped_->tangent_defect(v);
  }
  double point_tolerance() const override { return wrapped_->point_tolerance(); }

  long exp_calls() const { return exp_calls_.load(); }
  long log_calls() const { return log_calls_.load(); }
  void reset_counts() const {
    exp_calls_ = 0;
    log_calls_ = 0;
  }

 private:
  const Manifold* wrapped_;
  mutable std::atomic<long> exp_calls_{0};
  mutable std::atomic<long> log_calls_{0};
};

std::unique_ptr<Manifold> make_manifold(const ManifoldDescriptor& d);

// Two-point geodesic mean exp_x(a * log_x(y)) for a in [0, 1]. The endpoint
// weights return x respectively y without touching the maps.
Point weighted_mean_two(const Manifold& M, const Point& x, const Point& y, double a);

}  // namespace blendfit
