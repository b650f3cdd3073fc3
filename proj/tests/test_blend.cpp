#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <doctest.h>

#include "blendfit/blend.hpp"
#include "blendfit/testdata.hpp"

#include "test_util.hpp"

using namespace blendfit;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

FitProblem sphere_problem(std::uint64_t seed, int count, double sigma, int intervals,
                          double lambda) {
  const DataSet data = make_noisy_sphere_data(seed, count, sigma, intervals);
  FitProblem problem;
  problem.manifold = {ManifoldKind::sphere2, 3};
  problem.times = data.times;
  problem.data = data.points;
  problem.intervals = intervals;
  problem.lambda = lambda;
  return problem;
}

Point equator_point(double azimuth) {
  return Point{{std::cos(azimuth), std::sin(azimuth), 0.0}};
}

}  // namespace

TEST_CASE("blending weight hits the documented values and rejects the rest") {
  CHECK(weight(0.0) == 0.0);
  CHECK(weight(1.0) == 1.0);
  CHECK(weight(0.5) == 0.5);
  CHECK(weight(0.25) == doctest::Approx(0.15625).epsilon(1e-15));
  // Slope vanishes at both ends, which is what makes the junctions C1.
  const double h = 1e-6;
  CHECK(std::abs(weight(h) / h) < 1e-5);
  CHECK(std::abs((weight(1.0) - weight(1.0 - h)) / h) < 1e-5);
  CHECK_THROWS_AS(weight(-0.01), std::domain_error);
  CHECK_THROWS_AS(weight(1.01), std::domain_error);
}

TEST_CASE("anchors pick the data point nearest each integer, ties to the lower index") {
  const KnotGrid times{{0.0, 0.4, 0.9, 2.1, 2.2, 3.0}};
  std::vector<Point> data;
  for (int k = 0; k < 6; ++k) data.push_back(Point{{static_cast<double>(k)}});
  const AnchorSet anchors = select_anchors(times, 3, data);
  CHECK(anchors.indices == std::vector<int>{0, 2, 3, 5});
  CHECK(anchors.points[1].coords[0] == 2.0);

  const KnotGrid tie_times{{0.5, 1.5}};
  std::vector<Point> tie_data{Point{{0.0}}, Point{{1.0}}};
  const AnchorSet tie = select_anchors(tie_times, 1, tie_data);
  CHECK(tie.indices == std::vector<int>{0, 0});
}

TEST_CASE("euclidean blend reproduces the direct smoothing spline") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const KnotGrid times{{0.0, 0.31, 0.77, 1.2, 1.64, 2.18, 2.6, 3.0}};
  std::vector<std::vector<double>> rows;
  std::vector<Point> data;
  for (std::size_t k = 0; k < times.times.size(); ++k) {
    std::vector<double> row{gauss(rng), gauss(rng)};
    rows.push_back(row);
    data.push_back(Point{row});
  }
  Euclidean M(2);
  for (double lambda : {0.1, 1.0, 100.0, kInf}) {
    FitProblem problem{{ManifoldKind::euclidean, 2}, times, data, 3, lambda};
    const BlendedSpline blended = fit(M, problem);
    const SmoothingSpline direct = solve_smoothing_spline(times, rows, lambda);
    for (double t : uniform_samples(0.0, 3.0, 500)) {
      const Point p = eval(M, blended, t);
      const std::vector<double> q = eval_spline(direct, t);
      CHECK(std::abs(p.coords[0] - q[0]) < 1e-9);
      CHECK(std::abs(p.coords[1] - q[1]) < 1e-9);
    }
  }
}

TEST_CASE("interpolating fit passes through the data bit for bit") {
  // Data at integer times with infinite lambda: every anchor coincides with a
  // datum, the tangent spline interpolates, and the blend endpoints collapse.
  for (ManifoldKind kind : {ManifoldKind::sphere2, ManifoldKind::so3}) {
    std::mt19937_64 rng(29);
    const int n = 4;
    std::vector<Point> data;
    KnotGrid times;
    if (kind == ManifoldKind::sphere2) {
      // Nearby points so no log comes close to the cut locus.
      Sphere2 M;
      Point x{{1.0, 0.0, 0.0}};
      for (int i = 0; i <= n; ++i) {
        data.push_back(M.exp(x, testutil::random_tangent(M, x, rng, 0.6)));
        times.times.push_back(i);
      }
      FitProblem problem{{kind, 3}, times, data, n, kInf};
      const BlendedSpline s = fit(M, problem);
      for (int i = 0; i <= n; ++i) {
        CHECK(eval(M, s, i).coords == data[i].coords);
      }
      CHECK(data_misfit(M, s, times, data) == 0.0);
    } else {
      SO3 M;
      const Point x = testutil::random_rotation(rng);
      for (int i = 0; i <= n; ++i) {
        data.push_back(M.exp(x, testutil::random_tangent(M, x, rng, 0.6)));
        times.times.push_back(i);
      }
      FitProblem problem{{kind, 9}, times, data, n, kInf};
      const BlendedSpline s = fit(M, problem);
      for (int i = 0; i <= n; ++i) {
        CHECK(eval(M, s, i).coords == data[i].coords);
      }
    }
  }
}

TEST_CASE("uniform equator data yields the constant-speed equator") {
  // Lifted equator points are collinear and uniformly spaced in every anchor
  // tangent plane, so each tangent spline is the exact straight line and the
  // blend traces the equator at speed 0.8 for any lambda.
  Sphere2 M;
  KnotGrid times{{0.0, 1.0, 2.0, 3.0}};
  std::vector<Point> data;
  for (int i = 0; i < 4; ++i) data.push_back(equator_point(0.8 * i));
  FitProblem problem{{ManifoldKind::sphere2, 3}, times, data, 3, 100.0};
  const BlendedSpline s = fit(M, problem);
  for (double t : uniform_samples(0.0, 3.0, 200)) {
    const Point p = eval(M, s, t);
    CHECK(std::abs(p.coords[2]) < 1e-6);
    const double az = std::atan2(p.coords[1], p.coords[0]);
    const double want = std::fmod(0.8 * t, 2.0 * M_PI);
    CHECK(std::abs(az - (want > M_PI ? want - 2.0 * M_PI : want)) < 1e-6);
  }
  for (double t : uniform_samples(0.1, 2.9, 50)) {
    CHECK(std::abs(speed(M, s, t) - 0.8) < 1e-6);
  }
}

TEST_CASE("junction positions agree exactly and velocities to finite-difference order") {
  Sphere2 M;
  const BlendedSpline s = fit(M, sphere_problem(42, 41, 0.1, 4, 100.0));
  const std::vector<JunctionGaps> report = junction_report(M, s);
  REQUIRE(report.size() == 3);
  for (const JunctionGaps& g : report) {
    CHECK(g.position_gap == 0.0);
    const double scale = std::max(1.0, speed(M, s, g.junction));
    CHECK(g.velocity_gap <= 1e-3 * scale);
  }
}

TEST_CASE("so3 junctions behave the same way") {
  SO3 M;
  std::mt19937_64 rng(31);
  const int n = 3;
  KnotGrid times;
  std::vector<Point> data;
  const Point base = testutil::random_rotation(rng);
  for (int k = 0; k <= 9; ++k) {
    times.times.push_back(n * k / 9.0);
    const double a = 0.15 * k;
    data.push_back(M.exp(base, testutil::random_tangent(M, base, rng, 0.05 + 0.02 * a)));
  }
  FitProblem problem{{ManifoldKind::so3, 9}, times, data, n, 20.0};
  const BlendedSpline s = fit(M, problem);
  for (const JunctionGaps& g : junction_report(M, s)) {
    CHECK(g.position_gap == 0.0);
    CHECK(g.velocity_gap <= 1e-3 * std::max(1.0, speed(M, s, g.junction)));
  }
}

TEST_CASE("curve evaluation costs three exps and one log") {
  Sphere2 sphere;
  const CountingManifold counting(sphere);
  const FitProblem problem = sphere_problem(57, 21, 0.05, 4, 50.0);
  const BlendedSpline s = fit(counting, problem, ExecPolicy::serial);
  // One lift per anchor: (n + 1) * (m + 1) logs and nothing else.
  CHECK(counting.log_calls() == 5 * 21);
  CHECK(counting.exp_calls() == 0);

  counting.reset_counts();
  int evals = 0;
  for (double t : uniform_samples(0.05, 3.95, 1000)) {
    if (t == std::floor(t)) continue;
    (void)eval(counting, s, t);
    ++evals;
  }
  CHECK(counting.exp_calls() == 3 * evals);
  CHECK(counting.log_calls() == evals);
}

TEST_CASE("parallel fitting and evaluation match serial bit for bit") {
  Sphere2 M;
  const FitProblem problem = sphere_problem(67, 81, 0.15, 8, 10.0);
  const BlendedSpline serial = fit(M, problem, ExecPolicy::serial);
  const BlendedSpline parallel = fit(M, problem, ExecPolicy::parallel);

  REQUIRE(serial.pieces.size() == parallel.pieces.size());
  for (std::size_t i = 0; i < serial.pieces.size(); ++i) {
    const IntervalPieces& a = serial.pieces[i];
    const IntervalPieces& b = parallel.pieces[i];
    REQUIRE(a.left_pieces.size() == b.left_pieces.size());
    REQUIRE(a.right_pieces.size() == b.right_pieces.size());
    for (std::size_t p = 0; p < a.left_pieces.size(); ++p) {
      for (int c = 0; c < 4; ++c) {
        CHECK(a.left_pieces[p].control[c] == b.left_pieces[p].control[c]);
      }
    }
    for (std::size_t p = 0; p < a.right_pieces.size(); ++p) {
      for (int c = 0; c < 4; ++c) {
        CHECK(a.right_pieces[p].control[c] == b.right_pieces[p].control[c]);
      }
    }
  }

  const std::vector<double> ts = uniform_samples(0.0, 8.0, 2000);
  const std::vector<Point> es = eval_many(M, serial, ts, ExecPolicy::serial);
  const std::vector<Point> ep = eval_many(M, serial, ts, ExecPolicy::parallel);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(es[i].coords == ep[i].coords);

  const std::vector<double> ss = speed_many(M, serial, ts, 1e-5, ExecPolicy::serial);
  const std::vector<double> sp = speed_many(M, serial, ts, 1e-5, ExecPolicy::parallel);
  CHECK(ss == sp);
}

TEST_CASE("a single interval has no junctions and still fits") {
  Sphere2 M;
  const FitProblem problem = sphere_problem(71, 11, 0.05, 1, 5.0);
  const BlendedSpline s = fit(M, problem);
  CHECK(junction_report(M, s).empty());
  for (double t : uniform_samples(0.0, 1.0, 100)) {
    CHECK(M.point_defect(eval(M, s, t)) <= M.point_tolerance());
  }
}

TEST_CASE("antipodal data relative to an anchor is rejected as ill posed") {
  Sphere2 M;
  FitProblem problem;
  problem.manifold = {ManifoldKind::sphere2, 3};
  problem.times = KnotGrid{{0.0, 1.0}};
  problem.data = {Point{{0.0, 0.0, 1.0}}, Point{{0.0, 0.0, -1.0}}};
  problem.intervals = 1;
  problem.lambda = 1.0;
  CHECK_THROWS_AS(fit(M, problem, ExecPolicy::serial), WellPosednessError);
  CHECK_THROWS_AS(fit(M, problem, ExecPolicy::parallel), WellPosednessError);
}

TEST_CASE("fit rejects structurally bad problems") {
  Sphere2 M;
  FitProblem good = sphere_problem(73, 9, 0.05, 2, 1.0);
  CHECK_NOTHROW(fit(M, good));

  FitProblem wrong_kind = good;
  wrong_kind.manifold = {ManifoldKind::euclidean, 3};
  CHECK_THROWS_AS(fit(M, wrong_kind), std::invalid_argument);

  FitProblem bad_intervals = good;
  bad_intervals.intervals = 0;
  CHECK_THROWS_AS(fit(M, bad_intervals), std::invalid_argument);

  FitProblem late_times = good;
  late_times.times.times.back() = 2.5;
  CHECK_THROWS_AS(fit(M, late_times), std::invalid_argument);

  FitProblem negative_time = good;
  negative_time.times.times.front() = -0.25;
  CHECK_THROWS_AS(fit(M, negative_time), std::invalid_argument);

  FitProblem bad_lambda = good;
  bad_lambda.lambda = -1.0;
  CHECK_THROWS_AS(fit(M, bad_lambda), std::invalid_argument);

  FitProblem off_manifold = good;
  off_manifold.data[3].coords[0] += 0.01;
  CHECK_THROWS_AS(fit(M, off_manifold), std::invalid_argument);

  FitProblem count_mismatch = good;
  count_mismatch.data.pop_back();
  CHECK_THROWS_AS(fit(M, count_mismatch), std::invalid_argument);
}

TEST_CASE("evaluation and speed respect their domains") {
  Sphere2 M;
  const BlendedSpline s = fit(M, sphere_problem(79, 9, 0.05, 2, 1.0));
  CHECK_THROWS_AS(eval(M, s, -0.001), std::domain_error);
  CHECK_THROWS_AS(eval(M, s, 2.001), std::domain_error);
  CHECK_NOTHROW(eval(M, s, 0.0));
  CHECK_NOTHROW(eval(M, s, 2.0));
  CHECK_THROWS_AS(speed(M, s, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(speed(M, s, 1.0, -1e-5), std::invalid_argument);
  CHECK_NOTHROW(speed(M, s, 0.0));
  CHECK_NOTHROW(speed(M, s, 2.0));
  CHECK_THROWS_AS(junction_report(M, s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(junction_report(M, s, 1.0), std::invalid_argument);
}

TEST_CASE("uniform sample grids include both endpoints exactly") {
  const std::vector<double> ts = uniform_samples(0.0, 4.0, 9);
  CHECK(ts.size() == 9);
  CHECK(ts.front() == 0.0);
  CHECK(ts.back() == 4.0);
  CHECK(ts[4] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(uniform_samples(0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(uniform_samples(1.0, 1.0, 5), std::invalid_argument);
}

TEST_CASE("smoothed fits stay on the manifold everywhere") {
  Sphere2 sphere;
  const BlendedSpline s = fit(sphere, sphere_problem(83, 61, 0.2, 6, 3.0));
  for (double t : uniform_samples(0.0, 6.0, 500)) {
    CHECK(sphere.point_defect(eval(sphere, s, t)) <= sphere.point_tolerance());
  }
}

TEST_CASE("generated test data is deterministic and on the sphere") {
  const DataSet a = make_noisy_sphere_data(123, 25, 0.3, 4.0);
  const DataSet b = make_noisy_sphere_data(123, 25, 0.3, 4.0);
  REQUIRE(a.points.size() == 25);
  Sphere2 M;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].coords == b.points[i].coords);
    CHECK(M.point_defect(a.points[i]) <= M.point_tolerance());
  }
  CHECK(a.times.times.front() == 0.0);
  CHECK(a.times.times.back() == 4.0);
  // A different seed changes the noise.
  const DataSet c = make_noisy_sphere_data(124, 25, 0.3, 4.0);
  bool any_different = false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (a.points[i].coords != c.points[i].coords) any_different = true;
  }
  CHECK(any_different);
  // Zero noise stays on the closed-form path.
  const DataSet clean = make_noisy_sphere_data(125, 9, 0.0, 4.0);
  for (const Point& p : clean.points) CHECK(M.point_defect(p) <= 1e-15);
}
