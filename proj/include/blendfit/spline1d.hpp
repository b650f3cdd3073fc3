#pragma once

#include <array>
#include <vector>

namespace blendfit {

// Strictly increasing knot abscissae t_0 < ... < t_m.
struct KnotGrid {
  std::vector<double> times;

  int segments() const { return static_cast<int>(times.size()) - 1; }
};

// Throws std::invalid_argument unless the grid has at least two finite knots
// with spacing above 1e-12.
void check_knot_grid(const KnotGrid& grid);

// Natural cubic smoothing spline in R^r, stored as knot values and knot second
// derivatives (second derivatives vanish at both ends). lambda is the misfit
// weight; +infinity marks the interpolating limit where values equal the data.
struct SmoothingSpline {
  KnotGrid grid;
  std::vector<std::vector<double>> values;         // (m+1) x r
  std::vector<std::vector<double>> second_derivs;  // (m+1) x r
  double lambda = 1.0;

  int dim() const { return values.empty() ? 0 : static_cast<int>(values.front().size()); }
};

// One cubic in Bezier form on [lo, hi]; control holds the four R^r control
// points. Endpoint evaluation reproduces control.front()/control.back() bit
// for bit.
struct CubicSegment {
  double lo = 0.0;
  double hi = 1.0;
  std::array<std::vector<double>, 4> control;
};

// Minimizes  integral s''^2  +  lambda * sum_i |s(t_i) - d_i|^2  over natural
// cubics on the grid. data is (m+1) x r. lambda must be positive; +infinity
// yields the natural interpolant. All coordinates share one factorization.
SmoothingSpline solve_smoothing_spline(const KnotGrid& grid, const std::vector<std::vector<double>>& data,
                                       double lambda);

// Value at t. Outside [t_0, t_m] the spline continues linearly with the
// boundary slope. At a knot the stored knot value is returned bit for bit.
std::vector<double> eval_spline(const SmoothingSpline& s, double t);

// First derivative at t (constant outside [t_0, t_m]).
std::vector<double> eval_spline_deriv(const SmoothingSpline& s, double t);

// Integral of |s''|^2 over [t_0, t_m].
double bending_energy(const SmoothingSpline& s);

// Re-expresses s on [window_start, window_start + 1] as Bezier segments, one
// per knot interval overlapping the window (plus the window ends). Window
// ends need not be knots.
std::vector<CubicSegment> restrict_to_window(const SmoothingSpline& s, int window_start);

// Evaluates one Bezier segment by de Casteljau; t is clamped to [lo, hi].
std::vector<double> eval_segment(const CubicSegment& seg, double t);

// Evaluates a contiguous run of segments: picks the first segment whose hi
// covers t (the last one for t beyond the run).
std::vector<double> eval_pieces(const std::vector<CubicSegment>& pieces, double t);

}  // namespace blendfit
