#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "blendfit/oracle.hpp"
#include "blendfit/spline1d.hpp"

using namespace blendfit;

namespace {

std::vector<std::vector<double>> scalar_data(const std::vector<double>& v) {
  std::vector<std::vector<double>> rows;
  for (double x : v) rows.push_back({x});
  return rows;
}

}  // namespace

TEST_CASE("discretized minimizer approaches the interpolating tent at large lambda") {
  const KnotGrid grid{{0.0, 1.0, 2.0}};
  const auto data = scalar_data({0.0, 1.0, 0.0});
  const DiscretizedCurve c = discretized_energy_min(grid, data, 1e8, 2001);
  CHECK(std::abs(eval_discretized(c, 0.5)[0] - 0.6875) < 1e-3);
  CHECK(std::abs(eval_discretized(c, 1.0)[0] - 1.0) < 1e-3);
  CHECK(std::abs(eval_discretized(c, 1.5)[0] - 0.6875) < 1e-3);
}

TEST_CASE("discretized minimizer matches the spline solver across lambdas") {
  const KnotGrid grid{{0.0, 0.5, 1.25, 2.0}};
  const auto data = scalar_data({0.3, -0.4, 0.8, 0.1});
  for (double lambda : {0.1, 10.0, 1e4}) {
    const SmoothingSpline s = solve_smoothing_spline(grid, data, lambda);
    const DiscretizedCurve c = discretized_energy_min(grid, data, lambda, 2001);
    // Comparison times sit on the oracle grid, so no snapping error enters.
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0}) {
      CHECK(std::abs(eval_discretized(c, t)[0] - eval_spline(s, t)[0]) < 1e-3);
    }
    const double spline_energy = energy_of(s, grid, data);
    const double oracle_energy = energy_of(c, grid, data);
    CHECK(spline_energy <= oracle_energy + 1e-3);
    CHECK(std::abs(spline_energy - oracle_energy) < 0.05);
  }
}

TEST_CASE("discretized solution truly minimizes the discrete energy") {
  const KnotGrid grid{{0.0, 0.5, 1.25, 2.0}};
  const auto data = scalar_data({0.3, -0.4, 0.8, 0.1});
  const DiscretizedCurve c = discretized_energy_min(grid, data, 5.0, 501);
  const double base = energy_of(c, grid, data);
  std::mt19937_64 rng(101);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    DiscretizedCurve perturbed = c;
    for (auto& row : perturbed.values) row[0] += 1e-3 * gauss(rng);
    CHECK(energy_of(perturbed, grid, data) > base);
  }
}

TEST_CASE("discretization error shrinks as the grid refines") {
  const KnotGrid grid{{0.0, 0.75, 1.5, 2.0}};
  const auto data = scalar_data({0.2, 1.0, -0.6, 0.4});
  const double lambda = 2.0;
  const SmoothingSpline s = solve_smoothing_spline(grid, data, lambda);
  // Probe times are multiples of span/250, so they lie on every grid below.
  const std::vector<double> probes{0.4, 0.8, 1.2, 1.6};
  double prev = 1e300;
  for (int grid_size : {251, 501, 1001, 2001}) {
    const DiscretizedCurve c = discretized_energy_min(grid, data, lambda, grid_size);
    double worst = 0.0;
    for (double t : probes) {
      worst = std::max(worst, std::abs(eval_discretized(c, t)[0] - eval_spline(s, t)[0]));
    }
    // Monotone until the error reaches the solver's noise floor.
    CHECK(worst < std::max(prev, 1e-6));
    prev = worst;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("discretized minimizer handles vector data") {
  const KnotGrid grid{{0.0, 1.0, 2.0, 3.0}};
  const std::vector<std::vector<double>> data = {
      {0.0, 1.0}, {1.0, -1.0}, {0.5, 0.5}, {-0.2, 0.0}};
  const SmoothingSpline s = solve_smoothing_spline(grid, data, 3.0);
  const DiscretizedCurve c = discretized_energy_min(grid, data, 3.0, 1001);
  for (double t : {0.0, 0.75, 1.5, 2.25, 3.0}) {
    const auto sv = eval_spline(s, t);
    const auto cv = eval_discretized(c, t);
    CHECK(std::abs(sv[0] - cv[0]) < 1e-3);
    CHECK(std::abs(sv[1] - cv[1]) < 1e-3);
  }
}

TEST_CASE("linear interpolation between oracle nodes") {
  const KnotGrid grid{{0.0, 1.0}};
  const auto data = scalar_data({0.0, 1.0});
  const DiscretizedCurve c = discretized_energy_min(grid, data, 100.0, 101);
  const double mid = 0.5 * (c.values[3][0] + c.values[4][0]);
  CHECK(std::abs(eval_discretized(c, 0.035)[0] - mid) < 1e-14);
  CHECK(eval_discretized(c, -5.0) == c.values.front());
  CHECK(eval_discretized(c, 5.0) == c.values.back());
}

TEST_CASE("discretized minimizer rejects bad arguments") {
  const KnotGrid grid{{0.0, 1.0, 2.0}};
  const auto data = scalar_data({0.0, 1.0, 0.0});
  CHECK_THROWS_AS(discretized_energy_min(grid, data, 1.0, 49), std::invalid_argument);
  CHECK_THROWS_AS(discretized_energy_min(grid, data, 0.0, 501), std::invalid_argument);
  CHECK_THROWS_AS(
      discretized_energy_min(grid, data, std::numeric_limits<double>::infinity(), 501),
      std::invalid_argument);
  CHECK_THROWS_AS(discretized_energy_min(grid, scalar_data({0.0, 1.0}), 1.0, 501),
                  std::invalid_argument);
}
