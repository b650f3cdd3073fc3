#include "blendfit/spline1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace blendfit {

namespace {

// Symmetric positive definite band matrix with two sub-diagonals, factored in
// place as L L^T. One factorization serves every coordinate of a fit.
class BandedCholesky {
 public:
  // diag/off1/off2 hold the main diagonal and the first and second
  // sub-diagonals (off1[i] couples rows i and i+1).
  BandedCholesky(std::vector<double> diag, std::vector<double> off1, std::vector<double> off2)
      : l0_(std::move(diag)), l1_(std::move(off1)), l2_(std::move(off2)) {
    const int n = static_cast<int>(l0_.size());
    for (int i = 0; i < n; ++i) {
      double d = l0_[i];
      if (i >= 1) d -= l1_[i - 1] * l1_[i - 1];
      if (i >= 2) d -= l2_[i - 2] * l2_[i - 2];
      if (!(d > 0.0)) throw std::runtime_error("banded system not positive definite");
      l0_[i] = std::sqrt(d);
      if (i + 1 < n) {
        double v = l1_[i];
        if (i >= 1) v -= l1_[i - 1] * l2_[i - 1];
        l1_[i] = v / l0_[i];
      }
      if (i + 2 < n) l2_[i] /= l0_[i];
    }
  }

  std::vector<double> solve(const std::vector<double>& rhs) const {
    const int n = static_cast<int>(l0_.size());
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      double v = rhs[i];
      if (i >= 1) v -= l1_[i - 1] * y[i - 1];
      if (i >= 2) v -= l2_[i - 2] * y[i - 2];
      y[i] = v / l0_[i];
    }
    for (int i = n - 1; i >= 0; --i) {
      double v = y[i];
      if (i + 1 < n) v -= l1_[i] * y[i + 1];
      if (i + 2 < n) v -= l2_[i] * y[i + 2];
      y[i] = v / l0_[i];
    }
    return y;
  }

 private:
  std::vector<double> l0_, l1_, l2_;
};

// Last interval index j with t_j <= t, clamped to [0, m-1].
int locate_interval(const std::vector<double>& times, double t) {
  const int m = static_cast<int>(times.size()) - 1;
  auto it = std::upper_bound(times.begin(), times.end(), t);
  int j = static_cast<int>(it - times.begin()) - 1;
  return std::clamp(j, 0, m - 1);
}

// Value of the cubic on [t_j, t_j+h] from endpoint values a0, a1 and endpoint
// second derivatives s0, s1. The grouping keeps knot evaluation exact: tau=0
// gives a0 and tau=h gives a1 bit for bit.
double cubic_value(double a0, double a1, double s0, double s1, double h, double tau) {
  const double rem = h - tau;
  return a0 * (rem / h) + a1 * (tau / h) -
         (tau * rem / 6.0) * ((1.0 + rem / h) * s0 + (1.0 + tau / h) * s1);
}

double cubic_deriv(double a0, double a1, double s0, double s1, double h, double tau) {
  const double rem = h - tau;
  return (a1 - a0) / h - (s1 - s0) * h / 6.0 - s0 * rem * rem / (2.0 * h) +
         s1 * tau * tau / (2.0 * h);
}

}  // namespace

void check_knot_grid(const KnotGrid& grid) {
  if (grid.times.size() < 2) throw std::invalid_argument("knot grid needs at least two knots");
  for (double t : grid.times) {
    if (!std::isfinite(t)) throw std::invalid_argument("knot grid has a non-finite knot");
  }
  for (std::size_t j = 1; j < grid.times.size(); ++j) {
    if (!(grid.times[j] - grid.times[j - 1] > 1e-12)) {
      throw std::invalid_argument("knot grid must be strictly increasing (spacing > 1e-12)");
    }
  }
}

SmoothingSpline solve_smoothing_spline(const KnotGrid& grid, const std::vector<std::vector<double>>& data,
                                       double lambda) {
  check_knot_grid(grid);
  const int m = grid.segments();
  if (static_cast<int>(data.size()) != m + 1) {
    throw std::invalid_argument("smoothing spline needs one datum per knot");
  }
  const int r = static_cast<int>(data.front().size());
  if (r < 1) throw std::invalid_argument("smoothing spline data must have at least one coordinate");
  for (const auto& row : data) {
    if (static_cast<int>(row.size()) != r) {
      throw std::invalid_argument("smoothing spline data rows differ in size");
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw std::invalid_argument("smoothing spline data has a non-finite value");
    }
  }
  const bool interpolate = std::isinf(lambda);
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");

  SmoothingSpline s;
  s.grid = grid;
  s.lambda = lambda;
  s.values.assign(m + 1, std::vector<double>(r, 0.0));
  s.second_derivs.assign(m + 1, std::vector<double>(r, 0.0));

  const int interior = m - 1;
  if (interior == 0) {
    // Two knots: the optimum is the straight chord through the data for every
    // lambda, with vanishing second derivative.
    s.values = data;
    return s;
  }

  const std::vector<double>& t = grid.times;
  std::vector<double> h(m);
  for (int j = 0; j < m; ++j) h[j] = t[j + 1] - t[j];

  // R: Gram matrix of the natural basis, tridiagonal over interior knots.
  std::vector<double> diag(interior), off1(std::max(interior - 1, 0), 0.0),
      off2(std::max(interior - 2, 0), 0.0);
  for (int i = 0; i < interior; ++i) diag[i] = (h[i] + h[i + 1]) / 3.0;
  for (int i = 0; i + 1 < interior; ++i) off1[i] = h[i + 1] / 6.0;

  // Q^T maps knot values to second divided differences.
  auto apply_qt = [&](const std::vector<double>& a) {
    std::vector<double> out(interior);
    for (int i = 0; i < interior; ++i) {
      out[i] = (a[i + 2] - a[i + 1]) / h[i + 1] - (a[i + 1] - a[i]) / h[i];
    }
    return out;
  };
  auto apply_q = [&](const std::vector<double>& sigma) {
    std::vector<double> out(m + 1, 0.0);
    for (int i = 0; i < interior; ++i) {
      const int j = i + 1;
      out[j - 1] += sigma[i] / h[j - 1];
      out[j] -= (1.0 / h[j - 1] + 1.0 / h[j]) * sigma[i];
      out[j + 1] += sigma[i] / h[j];
    }
    return out;
  };

  if (!interpolate) {
    // Q^T Q is pentadiagonal; accumulate its bands from the columns of Q.
    for (int i = 0; i < interior; ++i) {
      const double bi = 1.0 / h[i];
      const double bj = 1.0 / h[i + 1];
      diag[i] += (bi * bi + (bi + bj) * (bi + bj) + bj * bj) / lambda;
      if (i + 1 < interior) {
        const double bk = 1.0 / h[i + 2];
        off1[i] -= bj * (bi + 2.0 * bj + bk) / lambda;
      }
      if (i + 2 < interior) {
        const double bk = 1.0 / h[i + 2];
        off2[i] += bj * bk / lambda;
      }
    }
  }

  BandedCholesky chol(diag, off1, off2);

  for (int k = 0; k < r; ++k) {
    std::vector<double> d(m + 1);
    for (int j = 0; j <= m; ++j) d[j] = data[j][k];
    const std::vector<double> rhs = apply_qt(d);
    const std::vector<double> sigma = chol.solve(rhs);
    for (int i = 0; i < interior; ++i) s.second_derivs[i + 1][k] = sigma[i];
    if (interpolate) {
      for (int j = 0; j <= m; ++j) s.values[j][k] = d[j];
    } else {
      const std::vector<double> q_sigma = apply_q(sigma);
      for (int j = 0; j <= m; ++j) s.values[j][k] = d[j] - q_sigma[j] / lambda;
    }
  }
  return s;
}

std::vector<double> eval_spline(const SmoothingSpline& s, double t) {
  const std::vector<double>& times = s.grid.times;
  const int r = s.dim();
  std::vector<double> out(r);
  if (t < times.front()) {
    const std::vector<double> d = eval_spline_deriv(s, times.front());
    const double dt = t - times.front();
    for (int k = 0; k < r; ++k) out[k] = s.values.front()[k] + dt * d[k];
    return out;
  }
  if (t > times.back()) {
    const std::vector<double> d = eval_spline_deriv(s, times.back());
    const double dt = t - times.back();
    for (int k = 0; k < r; ++k) out[k] = s.values.back()[k] + dt * d[k];
    return out;
  }
  const int j = locate_interval(times, t);
  const double h = times[j + 1] - times[j];
  const double tau = t - times[j];
  for (int k = 0; k < r; ++k) {
    out[k] = cubic_value(s.values[j][k], s.values[j + 1][k], s.second_derivs[j][k],
                         s.second_derivs[j + 1][k], h, tau);
  }
  return out;
}

std::vector<double> eval_spline_deriv(const SmoothingSpline& s, double t) {
  const std::vector<double>& times = s.grid.times;
  const int r = s.dim();
  const double tc = std::clamp(t, times.front(), times.back());
  const int j = locate_interval(times, tc);
  const double h = times[j + 1] - times[j];
  const double tau = tc - times[j];
  std::vector<double> out(r);
  for (int k = 0; k < r; ++k) {
    out[k] = cubic_deriv(s.values[j][k], s.values[j + 1][k], s.second_derivs[j][k],
                         s.second_derivs[j + 1][k], h, tau);
  }
  return out;
}

double bending_energy(const SmoothingSpline& s) {
  // s'' is linear on each interval, so the integral of its square over the
  // interval is h/3 * (s0^2 + s0 s1 + s1^2) per coordinate.
  const int m = s.grid.segments();
  const int r = s.dim();
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    const double h = s.grid.times[j + 1] - s.grid.times[j];
    for (int k = 0; k < r; ++k) {
      const double a = s.second_derivs[j][k];
      const double b = s.second_derivs[j + 1][k];
      total += h * (a * a + a * b + b * b) / 3.0;
    }
  }
  return total;
}

std::vector<CubicSegment> restrict_to_window(const SmoothingSpline& s, int window_start) {
  const double lo = window_start;
  const double hi = window_start + 1.0;
  std::vector<double> cuts{lo};
  for (double t : s.grid.times) {
    if (t > lo && t < hi) cuts.push_back(t);
  }
  cuts.push_back(hi);

  std::vector<CubicSegment> pieces;
  pieces.reserve(cuts.size() - 1);
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double p = cuts[c];
    const double q = cuts[c + 1];
    const double w = (q - p) / 3.0;
    CubicSegment seg;
    seg.lo = p;
    seg.hi = q;
    const std::vector<double> f0 = eval_spline(s, p);
    const std::vector<double> f1 = eval_spline(s, q);
    const std::vector<double> d0 = eval_spline_deriv(s, p);
    const std::vector<double> d1 = eval_spline_deriv(s, q);
    const int r = static_cast<int>(f0.size());
    for (auto& cp : seg.control) cp.resize(r);
    for (int k = 0; k < r; ++k) {
      seg.control[0][k] = f0[k];
      seg.control[1][k] = f0[k] + w * d0[k];
      seg.control[2][k] = f1[k] - w * d1[k];
      seg.control[3][k] = f1[k];
    }
    pieces.push_back(std::move(seg));
  }
  return pieces;
}

std::vector<double> eval_segment(const CubicSegment& seg, double t) {
  const double tc = std::clamp(t, seg.lo, seg.hi);
  if (tc == seg.lo) return seg.control[0];
  if (tc == seg.hi) return seg.control[3];
  const double u = (tc - seg.lo) / (seg.hi - seg.lo);
  const int r = static_cast<int>(seg.control[0].size());
  std::vector<double> out(r);
  for (int k = 0; k < r; ++k) {
    double b0 = seg.control[0][k], b1 = seg.control[1][k], b2 = seg.control[2][k],
           b3 = seg.control[3][k];
    b0 += u * (b1 - b0);
    b1 += u * (b2 - b1);
    b2 += u * (b3 - b2);
    b0 += u * (b1 - b0);
    b1 += u * (b2 - b1);
    b0 += u * (b1 - b0);
    out[k] = b0;
  }
  return out;
}

std::vector<double> eval_pieces(const std::vector<CubicSegment>& pieces, double t) {
  if (pieces.empty()) throw std::invalid_argument("eval_pieces: empty segment run");
  for (const CubicSegment& seg : pieces) {
    if (t <= seg.hi) return eval_segment(seg, t);
  }
  return eval_segment(pieces.back(), t);
}

}  // namespace blendfit
