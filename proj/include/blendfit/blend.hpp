#pragma once

#include <vector>

#include "blendfit/manifold.hpp"
#include "blendfit/spline1d.hpp"

namespace blendfit {

// Curve-fitting problem: data d_0..d_m on M at strictly increasing times
// inside [0, n], misfit weight lambda (+infinity interpolates), and the number
// of blending intervals n >= 1.
struct FitProblem {
  ManifoldDescriptor manifold;
  KnotGrid times;
  std::vector<Point> data;
  int intervals = 1;
  double lambda = 1.0;
};

// Anchor i is the data point whose time is nearest to i (ties pick the lower
// index); indices[i] is its position in the data array.
struct AnchorSet {
  std::vector<int> indices;
  std::vector<Point> points;
};

// Bezier pieces of the two tangent-space splines covering [i, i+1]:
// left_pieces live in the tangent space at anchor i, right_pieces in the one
// at anchor i+1. Both runs span exactly [i, i+1].
struct IntervalPieces {
  std::vector<CubicSegment> left_pieces;
  std::vector<CubicSegment> right_pieces;
};

// Fitted blended spline on [0, n]. Evaluation needs only the anchors and the
// per-interval Bezier pieces; data_times is kept for misfit reporting.
struct BlendedSpline {
  ManifoldDescriptor manifold;
  int intervals = 1;
  double lambda = 1.0;
  KnotGrid data_times;
  AnchorSet anchors;
  std::vector<IntervalPieces> pieces;
};

enum class ExecPolicy { serial, parallel };

// Throws std::invalid_argument on any structural defect of the problem:
// descriptor mismatch, bad grid, off-manifold data, times outside [0, n],
// nonpositive lambda.
void check_problem(const Manifold& M, const FitProblem& problem);

// Blending weight 3s^2 - 2s^3 on [0, 1] (std::domain_error outside).
double weight(double s);

AnchorSet select_anchors(const KnotGrid& times, int intervals, const std::vector<Point>& data);

// Logarithms of all data points at `anchor`, as an (m+1) x ambient_dim
// coordinate table. anchor_index (when >= 0) augments the cut-locus message.
std::vector<std::vector<double>> lift_data(const Manifold& M, const Point& anchor,
                                           const std::vector<Point>& data, int anchor_index = -1);

// Fits one full smoothing spline per anchor tangent space and stores its
// restriction to the one or two adjacent unit intervals. The parallel policy
// distributes anchors across threads; results are bitwise identical to
// serial, and the first (lowest-anchor) error is the one rethrown.
BlendedSpline fit(const Manifold& M, const FitProblem& problem,
                  ExecPolicy policy = ExecPolicy::parallel);

// Curve value at t in [0, n] (std::domain_error outside): the two-point
// geodesic mean of the left and right interval predictions under weight(t-i).
Point eval(const Manifold& M, const BlendedSpline& s, double t);

// Central-difference speed at t with half-width h (clipped at the ends of
// [0, n]): dist(B(t-h'), B(t+h'')) / (h' + h'').
double speed(const Manifold& M, const BlendedSpline& s, double t, double h = 1e-5);

struct JunctionGaps {
  int junction = 0;
  double position_gap = 0.0;
  double velocity_gap = 0.0;
};

// Continuity report at the interior junctions 1..n-1. position_gap compares
// the two interval formulas at t = i; velocity_gap is the one-sided
// finite-difference mismatch |log(B(i), B(i+h))/h - log(B(i), B(i-h))/(-h)|.
std::vector<JunctionGaps> junction_report(const Manifold& M, const BlendedSpline& s,
                                          double h = 1e-6);

std::vector<Point> eval_many(const Manifold& M, const BlendedSpline& s,
                             const std::vector<double>& ts,
                             ExecPolicy policy = ExecPolicy::parallel);

std::vector<double> speed_many(const Manifold& M, const BlendedSpline& s,
                               const std::vector<double>& ts, double h = 1e-5,
                               ExecPolicy policy = ExecPolicy::parallel);

// count points from lo to hi inclusive, uniformly spaced (count >= 2).
std::vector<double> uniform_samples(double lo, double hi, int count);

// sum_i dist(B(t_i), d_i)^2 over the fitting data.
double data_misfit(const Manifold& M, const BlendedSpline& s, const KnotGrid& times,
                   const std::vector<Point>& data);

}  // namespace blendfit
