#pragma once

// Test-only oracles, kept independent of the implementation paths they
// check.

#include <cmath>
#include <random>
#include <vector>

#include "blochwork/bloch.hpp"

namespace oracle {

/// Thermal Bloch vector by explicit eigendecomposition of the 2x2
/// Hamiltonian H = [[w/2, g/2], [g/2, -w/2]]: exponentiate -beta*H on the
/// eigenbasis, normalize, and trace against the Pauli operators.
inline blochwork::BlochVector gibbs_via_eigen(const blochwork::Controls& c,
                                              double beta) {
  const double a = c.omega / 2.0, b = c.g / 2.0;
  const double eps_half = std::hypot(a, b);
  if (eps_half == 0.0) return {0.0, 0.0, 0.0};
  // Eigenvector of eigenvalue +eps_half (handle the b = 0 axis separately).
  double v1x, v1y;
  if (b == 0.0) {
    v1x = (a > 0.0) ? 1.0 : 0.0;
    v1y = (a > 0.0) ? 0.0 : 1.0;
  } else {
    v1x = b;
    v1y = eps_half - a;
    const double n = std::hypot(v1x, v1y);
    v1x /= n;
    v1y /= n;
  }
  const double v2x = -v1y, v2y = v1x;  // orthogonal complement
  // Boltzmann weights relative to the ground eigenvalue to avoid overflow.
  const double p1 = std::exp(-2.0 * beta * eps_half);  // excited, +eps_half
  const double p2 = 1.0;                               // ground, -eps_half
  const double z_part = p1 + p2;
  const double rho00 = (p1 * v1x * v1x + p2 * v2x * v2x) / z_part;
  const double rho01 = (p1 * v1x * v1y + p2 * v2x * v2y) / z_part;
  const double rho11 = (p1 * v1y * v1y + p2 * v2y * v2y) / z_part;
  return {2.0 * rho01, 0.0, rho00 - rho11};
}

/// Deterministic sample of Bloch vectors strictly inside the unit ball.
inline std::vector<blochwork::BlochVector> ball_samples(int count,
                                                        unsigned seed = 7u) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<blochwork::BlochVector> out;
  while (static_cast<int>(out.size()) < count) {
    const blochwork::BlochVector r{u(rng), u(rng), u(rng)};
    if (blochwork::norm(r) < 0.95) out.push_back(r);
  }
  return out;
}

/// The shared control/bath test grid: omega, g from six signed values,
/// equal rates from four magnitudes, and four signed target polarizations.
struct GridCase {
  blochwork::Controls controls;
  blochwork::BathSpec bath;
};

inline std::vector<GridCase> ness_grid() {
  static const double controls_vals[] = {-2.0, -1.0, -0.3, 0.3, 1.0, 2.0};
  static const double rates[] = {0.1, 0.5, 1.0, 2.0};
  static const double polarizations[] = {-1.0, -0.5, 0.5, 1.0};
  std::vector<GridCase> grid;
  for (double w : controls_vals)
    for (double g : controls_vals)
      for (double rate : rates)
        for (double z0 : polarizations)
          grid.push_back({{w, g}, {rate, rate, z0}});
  return grid;
}

}  // namespace oracle
