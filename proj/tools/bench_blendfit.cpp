#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "blendfit/blend.hpp"
#include "blendfit/testdata.hpp"

namespace {

using namespace blendfit;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double max_coord_diff(const std::vector<Point>& a, const std::vector<Point>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].coords.size(); ++k) {
      worst = std::max(worst, std::abs(a[i].coords[k] - b[i].coords[k]));
    }
  }
  return worst;
}

}  // namespace

// Times the serial reference against the multithreaded path on one fit-heavy
// and one evaluation-heavy workload. Both paths must agree bit for bit; the
// benchmark doubles as a check of that.
int main() {
  const int points = 4001;
  const int intervals = 400;
  const double t_max = intervals;

  DataSet data = make_noisy_sphere_data(20240518, points, 0.05, t_max);
  Sphere2 sphere;

  FitProblem problem;
  problem.manifold = sphere.descriptor();
  problem.times = data.times;
  problem.data = data.points;
  problem.intervals = intervals;
  problem.lambda = 100.0;

#if defined(_OPENMP)
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("threads: %d, data points: %d, intervals: %d\n\n", threads, points, intervals);

  auto t0 = std::chrono::steady_clock::now();
  const BlendedSpline serial_fit = fit(sphere, problem, ExecPolicy::serial);
  const double fit_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const BlendedSpline parallel_fit = fit(sphere, problem, ExecPolicy::parallel);
  const double fit_parallel = seconds_since(t0);

  double fit_diff = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    fit_diff = std::max(fit_diff, max_coord_diff({serial_fit.anchors.points[i]},
                                                 {parallel_fit.anchors.points[i]}));
  }
  for (int i = 0; i < intervals; ++i) {
    const auto& sp = serial_fit.pieces[i];
    const auto& pp = parallel_fit.pieces[i];
    for (std::size_t p = 0; p < sp.left_pieces.size(); ++p) {
      for (int c = 0; c < 4; ++c) {
        fit_diff = std::max(fit_diff, max_coord_diff({Point{sp.left_pieces[p].control[c]}},
                                                     {Point{pp.left_pieces[p].control[c]}}));
      }
    }
  }

  const std::vector<double> ts = uniform_samples(0.0, intervals, 200000);
  t0 = std::chrono::steady_clock::now();
  const std::vector<Point> eval_serial = eval_many(sphere, serial_fit, ts, ExecPolicy::serial);
  const double eval_serial_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const std::vector<Point> eval_parallel = eval_many(sphere, serial_fit, ts, ExecPolicy::parallel);
  const double eval_parallel_s = seconds_since(t0);

  std::printf("%-22s %10s %10s %9s %12s\n", "workload", "serial", "parallel", "speedup",
              "max diff");
  std::printf("%-22s %9.3fs %9.3fs %8.2fx %12.3e\n", "fit (401 solves)", fit_serial, fit_parallel,
              fit_serial / fit_parallel, fit_diff);
  std::printf("%-22s %9.3fs %9.3fs %8.2fx %12.3e\n", "eval (200k samples)", eval_serial_s,
              eval_parallel_s, eval_serial_s / eval_parallel_s,
              max_coord_diff(eval_serial, eval_parallel));
  return 0;
}
