#pragma once

#include <cmath>
#include <random>

#include "adiab/grid.hpp"
#include "adiab/potential.hpp"

namespace testutil {

using adiab::cplx;
using adiab::Field;
using adiab::Grid1D;

inline Grid1D standard_grid() { return Grid1D(20.0, 512); }

inline Field sech_state(const Grid1D& g, double shift = 0.0) {
  return Field::from_function(g, [shift](double x) { return 1.0 / (std::sqrt(2.0) * std::cosh(x - shift)); });
}

/// Smooth random field: a few random Gaussian bumps with random phases.
inline Field random_field(const Grid1D& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(g);
  for (int b = 0; b < 4; ++b) {
    const double c = 5.0 * u(rng), w = 1.0 + 0.5 * u(rng), k = 2.0 * u(rng);
    const cplx amp(u(rng), u(rng));
    f += Field::from_function(g, [&](double x) {
      const double s = (x - c) / w;
      return amp * std::exp(-s * s) * std::polar(1.0, k * x);
    });
  }
  return f;
}

/// Smoothstep translating sech^2 well, center 0 -> 1 on [0, 1].
inline adiab::PotentialSpec translating_well() {
  return adiab::PotentialSpec::translating(1.0, adiab::Path::smoothstep(0.0, 1.0), 0.0, 1.0);
}

}  // namespace testutil
