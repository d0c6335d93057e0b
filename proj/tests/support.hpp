#pragma once

#include <cmath>
#include <random>

#include "phm/fock_core.hpp"

namespace phm::test {

/// Random normalized amplitude vector with every level populated.
inline PhotonAmplitudes random_state(std::mt19937_64& rng, int n_max) {
  std::normal_distribution<double> g;
  ComplexVector p(n_max + 1);
  for (int n = 0; n <= n_max; ++n) p(n) = Complex(g(rng), g(rng));
  p /= p.norm();
  return PhotonAmplitudes(p);
}

inline Complex random_amplitude(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = std::sqrt(u(rng));
  return std::polar(r, 2.0 * M_PI * u(rng));
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace phm::test
