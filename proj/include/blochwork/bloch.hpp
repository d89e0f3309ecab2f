#pragma once

// Dynamics and steady states of a driven dissipative qubit, plus the maps
// between Bloch, cylindrical, and triality coordinates.
//
// Model: H(omega, g) = (omega*sigma_z + g*sigma_x)/2 (hbar = 1), with fixed
// pointer-basis relaxation/dephasing acting on the Bloch vector r = (x,y,z):
//
//   dr/dt = h x r - Gamma2*(x,y,0) - Gamma1*(z - z0)*e_z,   h = (g, 0, omega).
//
// All functions here are pure; they may be called concurrently.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "blochwork/errors.hpp"

namespace blochwork {

/// Externally controlled Hamiltonian parameters (both in inverse time).
/// Signed values are allowed for both.
struct Controls {
  double omega = 0.0;  ///< sigma_z coefficient (detuning)
  double g = 0.0;      ///< sigma_x coefficient (drive amplitude)
};

/// Fixed pointer-basis dissipation channel.
struct BathSpec {
  double gamma1 = 1.0;  ///< longitudinal relaxation rate, > 0
  double gamma2 = 1.0;  ///< transverse decay rate, > 0
  double z0 = 1.0;      ///< target polarization, |z0| <= 1
};

/// Reduced qubit state: rho = (I + x*sx + y*sy + z*sz)/2.
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Complementarity coordinates plus the coherence phase.
/// Invariants: coherence, deficit >= 0 and
/// coherence^2 + predictability^2 + deficit^2 = 1 (up to fp rounding).
struct TrialityPoint {
  double coherence = 0.0;       ///< C = sqrt(x^2+y^2)
  double predictability = 0.0;  ///< P = z
  double deficit = 0.0;         ///< E = sqrt(1 - R^2), radial contraction
  double phase = 0.0;           ///< phi = atan2(y, x), in (-pi, pi]
};

/// Rates of change of the cylindrical coordinates (C, phi, P).
struct CylindricalRates {
  double coherence_rate = 0.0;
  double phase_rate = 0.0;
  double predictability_rate = 0.0;
};

// Numerical slack constants.
inline constexpr double kBallSlack = 1e-12;    // physical-radius tolerance
inline constexpr double kBallReject = 1e-9;    // beyond this, state rejected
inline constexpr double kPhaseFloor = 1e-14;   // C below this => phi := 0

inline double norm(const BlochVector& r) {
  return std::sqrt(r.x * r.x + r.y * r.y + r.z * r.z);
}

/// Throws ValidationError naming the violated invariant.
inline void validate(const BathSpec& b) {
  if (!(b.gamma1 > 0.0) || !std::isfinite(b.gamma1))
    throw ValidationError("BathSpec: gamma1 > 0 required, got " +
                          std::to_string(b.gamma1));
  if (!(b.gamma2 > 0.0) || !std::isfinite(b.gamma2))
    throw ValidationError("BathSpec: gamma2 > 0 required, got " +
                          std::to_string(b.gamma2));
  if (!(std::abs(b.z0) <= 1.0))
    throw ValidationError("BathSpec: |z0| <= 1 required, got " +
                          std::to_string(b.z0));
}

inline void validate(const Controls& c) {
  if (!std::isfinite(c.omega) || !std::isfinite(c.g))
    throw ValidationError("Controls: omega and g must be finite");
}

/// Right-hand side of the Bloch equation of motion.
/// Returns (dx,dy,dz)/dt = h x r - Gamma2*(x,y,0) - Gamma1*(z - z0)*e_z.
inline BlochVector bloch_rhs(const BlochVector& r, const Controls& c,
                             const BathSpec& b) noexcept {
  return { -c.omega * r.y - b.gamma2 * r.x,
           c.omega * r.x - c.g * r.z - b.gamma2 * r.y,
           c.g * r.y - b.gamma1 * (r.z - b.z0) };
}

/// Unique steady state of the Bloch equation, in closed form.
/// With D = Gamma2 + omega^2/Gamma2 + g^2/Gamma1:
///   x =  omega*g*z0 / (Gamma2*D),  y = -g*z0 / D,
///   z =  z0*(Gamma2 + omega^2/Gamma2) / D.
inline BlochVector ness_closed_form(const Controls& c, const BathSpec& b) {
  validate(b);
  const double d = b.gamma2 + c.omega * c.omega / b.gamma2 +
                   c.g * c.g / b.gamma1;
  return { c.omega * c.g * b.z0 / (b.gamma2 * d),
           -c.g * b.z0 / d,
           b.z0 * (b.gamma2 + c.omega * c.omega / b.gamma2) / d };
}

/// Independent route to the steady state: assemble the 3x3 drift system
/// M r = -a and solve by Gaussian elimination with partial pivoting.
/// Throws SingularDrift if the matrix is numerically singular.
inline BlochVector ness_linear_solve(const Controls& c, const BathSpec& b) {
  validate(b);
  // Row-major M from dr/dt = M r + a.
  std::array<std::array<double, 4>, 3> aug = {{
      {-b.gamma2, -c.omega, 0.0, 0.0},
      {c.omega, -b.gamma2, -c.g, 0.0},
      {0.0, c.g, -b.gamma1, -b.gamma1 * b.z0},
  }};
  double scale = 0.0;
  for (const auto& row : aug)
    for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(row[j]));
  const double pivot_floor = 1e-14 * std::max(scale, 1e-300);

  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
    if (std::abs(aug[pivot][col]) < pivot_floor)
      throw SingularDrift("drift matrix numerically singular (check rates)");
    std::swap(aug[col], aug[pivot]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = aug[r][col] / aug[col][col];
      for (int j = col; j < 4; ++j) aug[r][j] -= f * aug[col][j];
    }
  }
  BlochVector out;
  double* sol[3] = {&out.x, &out.y, &out.z};
  for (int r = 2; r >= 0; --r) {
    double acc = aug[r][3];
    for (int j = r + 1; j < 3; ++j) acc -= aug[r][j] * *sol[j];
    *sol[r] = acc / aug[r][r];
  }
  return out;
}

/// RK4 stability bound for the fixed-step integrator used below.
inline double max_rate(const Controls& c, const BathSpec& b) {
  return std::max({std::abs(c.omega), std::abs(c.g), b.gamma1, b.gamma2});
}

namespace detail {

inline BlochVector axpy(const BlochVector& r, const BlochVector& k, double h) {
  return {r.x + h * k.x, r.y + h * k.y, r.z + h * k.z};
}

inline BlochVector rk4_step(const BlochVector& r, const Controls& c,
                            const BathSpec& b, double dt) {
  const BlochVector k1 = bloch_rhs(r, c, b);
  const BlochVector k2 = bloch_rhs(axpy(r, k1, dt / 2), c, b);
  const BlochVector k3 = bloch_rhs(axpy(r, k2, dt / 2), c, b);
  const BlochVector k4 = bloch_rhs(axpy(r, k3, dt), c, b);
  return {r.x + dt / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
          r.y + dt / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
          r.z + dt / 6 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z)};
}

}  // namespace detail

/// Relax toward the steady state by classical fixed-step RK4 integration.
/// The exact steady state is a fixed point of the discrete map, so for
/// t_final >> 1/min(Gamma1, Gamma2) this converges to ness_closed_form.
/// Throws StepTooLarge if dt > 0.1 / max(|omega|, |g|, Gamma1, Gamma2).
inline BlochVector relax_to_ness(const BlochVector& initial, const Controls& c,
                                 const BathSpec& b, double t_final,
                                 double dt) {
  validate(b);
  if (!(dt > 0.0)) throw ValidationError("relax_to_ness: dt > 0 required");
  if (!(t_final >= 0.0))
    throw ValidationError("relax_to_ness: t_final >= 0 required");
  const double bound = 0.1 / max_rate(c, b);
  if (dt > bound)
    throw StepTooLarge("relax_to_ness: dt " + std::to_string(dt) +
                       " exceeds stability bound " + std::to_string(bound));
  const auto steps = static_cast<long long>(t_final / dt);
  BlochVector r = initial;
  for (long long i = 0; i < steps; ++i) r = detail::rk4_step(r, c, b, dt);
  const double rem = t_final - static_cast<double>(steps) * dt;
  if (rem > 0.0) r = detail::rk4_step(r, c, b, rem);
  return r;
}

/// Map a Bloch vector to triality coordinates (C, P, E, phi).
/// States with radius in (1, 1+1e-9] are projected back onto the sphere
/// (E = 0); beyond that slack OutsideBall is thrown. E = 0 exactly for a
/// clamped pure state. phi = 0 by convention when C < 1e-14.
inline TrialityPoint to_triality(const BlochVector& state) {
  double x = state.x, y = state.y, z = state.z;
  const double radius = norm(state);
  if (radius > 1.0 + kBallReject)
    throw OutsideBall("to_triality: |r| = " + std::to_string(radius) +
                      " exceeds 1 + 1e-9");
  TrialityPoint t;
  if (radius > 1.0) {
    // Floating-point overshoot of a pure state: rescale onto the sphere.
    x /= radius;
    y /= radius;
    z /= radius;
    t.deficit = 0.0;
  } else {
    t.deficit = std::sqrt(std::max(0.0, 1.0 - radius * radius));
  }
  t.coherence = std::sqrt(x * x + y * y);
  t.predictability = z;
  t.phase = (t.coherence < kPhaseFloor) ? 0.0 : std::atan2(y, x);
  if (t.phase == -std::numbers::pi) t.phase = std::numbers::pi;  // phi in (-pi, pi]
  return t;
}

/// Inverse of the cylindrical map restricted to the Bloch ball.
inline BlochVector from_triality(const TrialityPoint& t) {
  return {t.coherence * std::cos(t.phase), t.coherence * std::sin(t.phase),
          t.predictability};
}

/// Coherence phase of the steady state. Satisfies tan(phi) = -Gamma2/omega
/// for omega != 0, with the branch fixed by sign(x) = sign(omega*g*z0) and
/// sign(y) = -sign(g*z0); at omega = 0 this yields -sign(g*z0)*pi/2.
/// Throws DegenerateCoherence when g = 0 or z0 = 0 (no coherence, phase
/// undefined).
inline double phase_of_ness(const Controls& c, const BathSpec& b) {
  validate(b);
  if (c.g == 0.0 || b.z0 == 0.0)
    throw DegenerateCoherence(
        "phase_of_ness: steady state has no coherence (g = 0 or z0 = 0)");
  const BlochVector r = ness_closed_form(c, b);
  return std::atan2(r.y, r.x);
}

/// Thermal (Gibbs) state of H(omega, g) at inverse temperature beta:
/// r = -tanh(beta*eps/2) * (g, 0, omega)/eps with eps = sqrt(omega^2 + g^2);
/// the maximally mixed state when eps = 0.
inline BlochVector gibbs_state(const Controls& c, double beta) {
  if (!(beta >= 0.0))
    throw ValidationError("gibbs_state: beta >= 0 required");
  const double eps = std::hypot(c.omega, c.g);
  if (eps == 0.0) return {0.0, 0.0, 0.0};
  const double purity = std::tanh(beta * eps / 2.0);
  return {-purity * c.g / eps, 0.0, -purity * c.omega / eps};
}

/// Chain-rule rates of the cylindrical coordinates along the Bloch flow:
///   dC/dt   = -Gamma2*C - g*P*sin(phi)
///   dphi/dt =  omega - (g*P/C)*cos(phi)
///   dP/dt   =  g*C*sin(phi) - Gamma1*(P - z0)
/// Throws DegenerateCoherence when C < 1e-14 (phase rate undefined).
inline CylindricalRates cylindrical_rates(const BlochVector& state,
                                          const Controls& c,
                                          const BathSpec& b) {
  const double coh_sq = state.x * state.x + state.y * state.y;
  const double coh = std::sqrt(coh_sq);
  if (coh < kPhaseFloor)
    throw DegenerateCoherence("cylindrical_rates: C too small");
  const BlochVector v = bloch_rhs(state, c, b);
  return {(state.x * v.x + state.y * v.y) / coh,
          (state.x * v.y - state.y * v.x) / coh_sq, v.z};
}

}  // namespace blochwork
