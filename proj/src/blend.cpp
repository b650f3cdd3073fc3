#include "blendfit/blend.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace blendfit {

namespace {

// Runs fn(i) for i in [0, count), serially or across threads. Parallel runs
// write into disjoint slots, so results match the serial order bit for bit;
// the lowest-index exception is the one rethrown, as in the serial loop.
template <typename Fn>
void run_indexed(int count, ExecPolicy policy, Fn&& fn) {
  if (policy == ExecPolicy::serial) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
  for (int i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (int i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
}

// Prediction of interval i's formula at t: both tangent splines evaluated at
// t, mapped back through their anchors, then geodesically blended. Every
// generic evaluation costs exactly 3 exp and 1 log.
Point eval_on_interval(const Manifold& M, const BlendedSpline& s, int i, double t) {
  const IntervalPieces& pieces = s.pieces[i];
  const Point& left_anchor = s.anchors.points[i];
  const Point& right_anchor = s.anchors.points[i + 1];
  TangentVector vl{left_anchor, eval_pieces(pieces.left_pieces, t)};
  TangentVector vr{right_anchor, eval_pieces(pieces.right_pieces, t)};
  const Point L = M.exp(left_anchor, vl);
  const Point R = M.exp(right_anchor, vr);
  return weighted_mean_two(M, L, R, weight(t - i));
}

int interval_of(const BlendedSpline& s, double t) {
  return std::clamp(static_cast<int>(std::floor(t)), 0, s.intervals - 1);
}

}  // namespace

void check_problem(const Manifold& M, const FitProblem& problem) {
  check_descriptor(problem.manifold);
  if (problem.manifold.kind != M.kind() || problem.manifold.ambient_dim != M.ambient_dim()) {
    throw std::invalid_argument("problem descriptor does not match the manifold");
  }
  if (problem.intervals < 1) throw std::invalid_argument("intervals must be at least 1");
  check_knot_grid(problem.times);
  if (problem.data.size() != problem.times.times.size()) {
    throw std::invalid_argument("data count does not match the number of times");
  }
  const double n = problem.intervals;
  if (problem.times.times.front() < 0.0 || problem.times.times.back() > n) {
    throw std::invalid_argument("data times must lie in [0, intervals]");
  }
  if (std::isnan(problem.lambda) || !(problem.lambda > 0.0)) {
    throw std::invalid_argument("lambda must be positive (or infinite to interpolate)");
  }
  for (std::size_t i = 0; i < problem.data.size(); ++i) {
    std::ostringstream what;
    what << "data point " << i;
    M.require_point(problem.data[i], what.str());
  }
}

double weight(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("blend weight argument outside [0, 1]");
  return s * s * (3.0 - 2.0 * s);
}

AnchorSet select_anchors(const KnotGrid& times, int intervals, const std::vector<Point>& data) {
  AnchorSet anchors;
  anchors.indices.resize(intervals + 1);
  anchors.points.resize(intervals + 1);
  for (int i = 0; i <= intervals; ++i) {
    int best = 0;
    double best_gap = std::abs(times.times[0] - i);
    for (std::size_t k = 1; k < times.times.size(); ++k) {
      const double gap = std::abs(times.times[k] - i);
      if (gap < best_gap) {
        best = static_cast<int>(k);
        best_gap = gap;
      }
    }
    anchors.indices[i] = best;
    anchors.points[i] = data[best];
  }
  return anchors;
}

std::vector<std::vector<double>> lift_data(const Manifold& M, const Point& anchor,
                                           const std::vector<Point>& data, int anchor_index) {
  std::vector<std::vector<double>> lifted(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    try {
      lifted[k] = M.log(anchor, data[k]).coords;
    } catch (const WellPosednessError& e) {
      std::ostringstream msg;
      msg << e.what() << " (data point " << k;
      if (anchor_index >= 0) msg << ", anchor " << anchor_index;
      msg << ")";
      throw WellPosednessError(msg.str());
    }
  }
  return lifted;
}

BlendedSpline fit(const Manifold& M, const FitProblem& problem, ExecPolicy policy) {
  check_problem(M, problem);
  BlendedSpline s;
  s.manifold = problem.manifold;
  s.intervals = problem.intervals;
  s.lambda = problem.lambda;
  s.data_times = problem.times;
  s.anchors = select_anchors(problem.times, problem.intervals, problem.data);
  s.pieces.resize(problem.intervals);

  const int n = problem.intervals;
  // Anchor i's spline restricted to [i-1, i] and [i, i+1]; both restrictions
  // come from the one solve, which is what makes the junctions C^1.
  std::vector<std::vector<CubicSegment>> into_left(n + 1), into_right(n + 1);
  run_indexed(n + 1, policy, [&](int i) {
    const std::vector<std::vector<double>> lifted =
        lift_data(M, s.anchors.points[i], problem.data, i);
    const SmoothingSpline tangent_spline =
        solve_smoothing_spline(problem.times, lifted, problem.lambda);
    if (i < n) into_right[i] = restrict_to_window(tangent_spline, i);
    if (i > 0) into_left[i] = restrict_to_window(tangent_spline, i - 1);
  });
  for (int i = 0; i < n; ++i) {
    s.pieces[i].left_pieces = std::move(into_right[i]);
    s.pieces[i].right_pieces = std::move(into_left[i + 1]);
  }
  return s;
}

Point eval(const Manifold& M, const BlendedSpline& s, double t) {
  if (!(t >= 0.0 && t <= s.intervals)) {
    throw std::domain_error("evaluation time outside [0, intervals]");
  }
  return eval_on_interval(M, s, interval_of(s, t), t);
}

double speed(const Manifold& M, const BlendedSpline& s, double t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("speed half-width must be positive");
  const double lo = std::max(0.0, t - h);
  const double hi = std::min(static_cast<double>(s.intervals), t + h);
  if (!(hi > lo)) throw std::domain_error("speed window degenerate at t");
  return M.dist(eval(M, s, lo), eval(M, s, hi)) / (hi - lo);
}

std::vector<JunctionGaps> junction_report(const Manifold& M, const BlendedSpline& s, double h) {
  if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("junction step must lie in (0, 1)");
  std::vector<JunctionGaps> report;
  report.reserve(std::max(s.intervals - 1, 0));
  for (int i = 1; i < s.intervals; ++i) {
    JunctionGaps g;
    g.junction = i;
    const Point from_left = eval_on_interval(M, s, i - 1, i);
    const Point from_right = eval_on_interval(M, s, i, i);
    g.position_gap = M.dist(from_left, from_right);
    const Point at = from_right;
    const TangentVector fwd = M.log(at, eval(M, s, i + h));
    const TangentVector bwd = M.log(at, eval(M, s, i - h));
    TangentVector mismatch{at, fwd.coords};
    for (std::size_t k = 0; k < mismatch.coords.size(); ++k) mismatch.coords[k] += bwd.coords[k];
    g.velocity_gap = M.norm(mismatch) / h;
    report.push_back(g);
  }
  return report;
}

std::vector<Point> eval_many(const Manifold& M, const BlendedSpline& s,
                             const std::vector<double>& ts, ExecPolicy policy) {
  std::vector<Point> out(ts.size());
  run_indexed(static_cast<int>(ts.size()), policy, [&](int i) { out[i] = eval(M, s, ts[i]); });
  return out;
}

std::vector<double> speed_many(const Manifold& M, const BlendedSpline& s,
                               const std::vector<double>& ts, double h, ExecPolicy policy) {
  std::vector<double> out(ts.size());
  run_indexed(static_cast<int>(ts.size()), policy, [&](int i) { out[i] = speed(M, s, ts[i], h); });
  return out;
}

std::vector<double> uniform_samples(double lo, double hi, int count) {
  if (count < 2) throw std::invalid_argument("uniform_samples needs at least two points");
  if (!(hi > lo)) throw std::invalid_argument("uniform_samples needs hi > lo");
  std::vector<double> ts(count);
  for (int i = 0; i < count; ++i) {
    ts[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  ts.back() = hi;
  return ts;
}

double data_misfit(const Manifold& M, const BlendedSpline& s, const KnotGrid& times,
                   const std::vector<Point>& data) {
  if (times.times.size() != data.size()) {
    throw std::invalid_argument("data_misfit: times and data differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double d = M.dist(eval(M, s, times.times[i]), data[i]);
    total += d * d;
  }
  return total;
}

}  // namespace blendfit
