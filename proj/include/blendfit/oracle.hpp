#pragma once

#include <vector>

#include "blendfit/spline1d.hpp"

namespace blendfit {

// Piecewise-linear curve on a uniform grid, the output of the discretized
// minimizer below.
struct DiscretizedCurve {
  std::vector<double> times;                // grid_size nodes, uniform
  std::vector<std::vector<double>> values;  // grid_size x r
  double lambda = 1.0;
};

// Minimizes the same energy as solve_smoothing_spline over grid functions:
// second differences replace s'' and each datum is attached to its nearest
// grid node. Independent route used to cross-check the spline solver. lambda
// must be finite and positive; grid_size >= 50.
DiscretizedCurve discretized_energy_min(const KnotGrid& times, const std::vector<std::vector<double>>& data,
                                        double lambda, int grid_size);

// Linear interpolation between grid nodes (clamped outside).
std::vector<double> eval_discretized(const DiscretizedCurve& c, double t);

// Energy of the discretized curve: squared second differences times the step,
// plus lambda times the squared misfit at the snapped data nodes.
double energy_of(const DiscretizedCurve& c, const KnotGrid& times,
                 const std::vector<std::vector<double>>& data);

// Energy of a spline against the same data: exact bending integral plus
// lambda times the squared misfit at the data times. An infinite lambda
// reports the bending integral alone.
double energy_of(const SmoothingSpline& s, const KnotGrid& times,
                 const std::vector<std::vector<double>>& data);

}  // namespace blendfit
