#include "blendfit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace blendfit {

namespace {

int snap_index(double t, double t0, double step, int grid_size) {
  const int i = static_cast<int>(std::lround((t - t0) / step));
  return std::clamp(i, 0, grid_size - 1);
}

}  // namespace

DiscretizedCurve discretized_energy_min(const KnotGrid& times, const std::vector<std::vector<double>>& data,
                                        double lambda, int grid_size) {
  check_knot_grid(times);
  if (data.size() != times.times.size()) {
    throw std::invalid_argument("discretized minimizer needs one datum per time");
  }
  if (grid_size < 50) throw std::invalid_argument("grid_size must be at least 50");
  if (!std::isfinite(lambda) || !(lambda > 0.0)) {
    throw std::invalid_argument("discretized minimizer needs finite positive lambda");
  }
  const int r = static_cast<int>(data.front().size());
  const double t0 = times.times.front();
  const double t1 = times.times.back();
  const double step = (t1 - t0) / (grid_size - 1);

  DiscretizedCurve curve;
  curve.lambda = lambda;
  curve.times.resize(grid_size);
  for (int i = 0; i < grid_size; ++i) curve.times[i] = t0 + step * i;
  curve.times.back() = t1;

  // Quadratic form: step * sum over interior nodes of the squared second
  // difference (stencil (1,-2,1)/step^2), plus lambda at each snapped datum.
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::SparseMatrix<double> A(grid_size, grid_size);
  const double w = 1.0 / (step * step);
  for (int j = 1; j + 1 < grid_size; ++j) {
    const double row[3] = {w, -2.0 * w, w};
    const int cols[3] = {j - 1, j, j + 1};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        trips.emplace_back(cols[a], cols[b], step * row[a] * row[b]);
      }
    }
  }
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(grid_size, r);
  for (std::size_t k = 0; k < data.size(); ++k) {
    const int node = snap_index(times.times[k], t0, step, grid_size);
    trips.emplace_back(node, node, lambda);
    for (int c = 0; c < r; ++c) rhs(node, c) += lambda * data[k][c];
  }
  A.setFromTriplets(trips.begin(), trips.end());

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("discretized minimizer: factorization failed");
  }
  const Eigen::MatrixXd sol = solver.solve(rhs);
  curve.values.assign(grid_size, std::vector<double>(r));
  for (int i = 0; i < grid_size; ++i) {
    for (int c = 0; c < r; ++c) curve.values[i][c] = sol(i, c);
  }
  return curve;
}

std::vector<double> eval_discretized(const DiscretizedCurve& c, double t) {
  const int n = static_cast<int>(c.times.size());
  if (t <= c.times.front()) return c.values.front();
  if (t >= c.times.back()) return c.values.back();
  auto it = std::upper_bound(c.times.begin(), c.times.end(), t);
  const int j = std::clamp(static_cast<int>(it - c.times.begin()) - 1, 0, n - 2);
  const double u = (t - c.times[j]) / (c.times[j + 1] - c.times[j]);
  const int r = static_cast<int>(c.values.front().size());
  std::vector<double> out(r);
  for (int k = 0; k < r; ++k) {
    out[k] = (1.0 - u) * c.values[j][k] + u * c.values[j + 1][k];
  }
  return out;
}

double energy_of(const DiscretizedCurve& c, const KnotGrid& times,
                 const std::vector<std::vector<double>>& data) {
  const int n = static_cast<int>(c.times.size());
  const double step = (c.times.back() - c.times.front()) / (n - 1);
  const int r = static_cast<int>(c.values.front().size());
  double bending = 0.0;
  for (int j = 1; j + 1 < n; ++j) {
    for (int k = 0; k < r; ++k) {
      const double dd = (c.values[j - 1][k] - 2.0 * c.values[j][k] + c.values[j + 1][k]) /
                        (step * step);
      bending += dd * dd * step;
    }
  }
  double misfit = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int node = snap_index(times.times[i], c.times.front(), step, n);
    for (int k = 0; k < r; ++k) {
      const double d = c.values[node][k] - data[i][k];
      misfit += d * d;
    }
  }
  return bending + c.lambda * misfit;
}

double energy_of(const SmoothingSpline& s, const KnotGrid& times,
                 const std::vector<std::vector<double>>& data) {
  const double bending = bending_energy(s);
  if (std::isinf(s.lambda)) return bending;
  double misfit = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::vector<double> v = eval_spline(s, times.times[i]);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double d = v[k] - data[i][k];
      misfit += d * d;
    }
  }
  return bending + s.lambda * misfit;
}

}  // namespace blendfit
