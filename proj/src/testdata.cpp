#include "blendfit/testdata.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace blendfit {

DataSet make_noisy_sphere_data(std::uint64_t seed, int count, double sigma, double t_max) {
  if (count < 2) throw std::invalid_argument("testdata: count must be at least 2");
  if (!(sigma >= 0.0)) throw std::invalid_argument("testdata: sigma must be nonnegative");
  if (!(t_max > 0.0)) throw std::invalid_argument("testdata: t_max must be positive");

  Sphere2 sphere;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  DataSet data;
  data.times.times.resize(count);
  data.points.resize(count);
  for (int i = 0; i < count; ++i) {
    const double t = t_max * static_cast<double>(i) / static_cast<double>(count - 1);
    data.times.times[i] = t;

    // One loop around the sphere with a wobbling inclination.
    const double phase = 2.0 * M_PI * t / t_max;
    const double incl = M_PI / 3.0 + 0.3 * std::sin(phase);
    const double az = phase;
    Point base;
    base.coords = {std::sin(incl) * std::cos(az), std::sin(incl) * std::sin(az), std::cos(incl)};

    // Orthonormal tangent frame at base; two Gaussian draws per point keep
    // the stream aligned even when sigma is zero.
    const double e_incl[3] = {std::cos(incl) * std::cos(az), std::cos(incl) * std::sin(az),
                              -std::sin(incl)};
    const double e_az[3] = {-std::sin(az), std::cos(az), 0.0};
    const double g1 = gauss(rng);
    const double g2 = gauss(rng);
    TangentVector noise{base, {0.0, 0.0, 0.0}};
    for (int k = 0; k < 3; ++k) noise.coords[k] = sigma * (g1 * e_incl[k] + g2 * e_az[k]);
    data.points[i] = sphere.exp(base, noise);
  }
  return data;
}

}  // namespace blendfit
