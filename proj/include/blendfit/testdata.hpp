#pragma once

#include <cstdint>

#include "blendfit/model_io.hpp"

namespace blendfit {

// Deterministic noisy samples of a closed-form spherical path: count points
// at uniform times in [0, t_max], each displaced by Gaussian tangent noise of
// scale sigma. Identical arguments reproduce identical bytes on one platform.
DataSet make_noisy_sphere_data(std::uint64_t seed, int count, double sigma, double t_max);

}  // namespace blendfit
