#pragma once

// The quasistatic work connection A_i = Tr[rho_ss d_i H] on control space
// (omega, g), its curvature F_{omega g} = d_omega A_g - d_g A_omega by three
// independent routes, the thermal potential of the Hamiltonian-aligned
// (Gibbs) limit, and the weak-mismatch expansion of the phase-resolved
// curvature.

#include <cmath>
#include <string>

#include "blochwork/bloch.hpp"
#include "blochwork/errors.hpp"

namespace blochwork {

/// Components of the work one-form A = A_omega d(omega) + A_g d(g).
/// On the pointer-basis steady state: A_omega = z/2, A_g = x/2.
struct ConnectionValue {
  double a_omega = 0.0;
  double a_g = 0.0;
};

enum class CurvatureMethod { FiniteDifference, ClosedForm, PhaseResolved };

struct CurvatureSample {
  double f_omega_g = 0.0;
  Controls location{};
  CurvatureMethod method = CurvatureMethod::ClosedForm;
};

/// Work connection evaluated on the pointer-basis steady state.
inline ConnectionValue connection_pointer(const Controls& c,
                                          const BathSpec& b) {
  const BlochVector r = ness_closed_form(c, b);
  return {r.z / 2.0, r.x / 2.0};
}

/// Work connection of the Hamiltonian-aligned (thermal) steady state:
/// A = -tanh(beta*eps/2)/(2*eps) * (omega, g); (0,0) at eps = 0.
inline ConnectionValue connection_gibbs(const Controls& c, double beta) {
  const BlochVector r = gibbs_state(c, beta);
  return {r.z / 2.0, r.x / 2.0};
}

/// Thermal potential F_th = -(1/beta) * ln(2 cosh(beta*eps/2)).
/// Its control-space gradient equals connection_gibbs exactly.
inline double free_energy_gibbs(const Controls& c, double beta) {
  if (!(beta > 0.0))
    throw ValidationError("free_energy_gibbs: beta > 0 required");
  const double a = beta * std::hypot(c.omega, c.g) / 2.0;
  // ln(2 cosh a) = a + log1p(exp(-2a)), overflow-safe for large a.
  return -(a + std::log1p(std::exp(-2.0 * a))) / beta;
}

namespace detail {

/// Fourth-order curl of a connection field: central differences at steps h
/// and h/2 combined by Richardson extrapolation.
template <typename ConnFn>
double curl_fd(ConnFn&& conn, const Controls& c, double h) {
  const auto curl_at = [&](double step) {
    const double dag_domega =
        (conn(Controls{c.omega + step, c.g}).a_g -
         conn(Controls{c.omega - step, c.g}).a_g) /
        (2.0 * step);
    const double daomega_dg =
        (conn(Controls{c.omega, c.g + step}).a_omega -
         conn(Controls{c.omega, c.g - step}).a_omega) /
        (2.0 * step);
    return dag_domega - daomega_dg;
  };
  const double coarse = curl_at(h);
  const double fine = curl_at(h / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace detail

/// Curvature of the pointer-basis connection by finite differences.
/// `rel_step` scales against max(|omega|, |g|, Gamma2); only the controls
/// are perturbed, so bath validity is unaffected by the stencil.
inline CurvatureSample curvature_fd(const Controls& c, const BathSpec& b,
                                    double rel_step = 1e-4) {
  validate(b);
  if (!(rel_step > 0.0))
    throw ValidationError("curvature_fd: step > 0 required");
  const double h =
      rel_step * std::max({std::abs(c.omega), std::abs(c.g), b.gamma2});
  const double f = detail::curl_fd(
      [&](const Controls& cc) { return connection_pointer(cc, b); }, c, h);
  return {f, c, CurvatureMethod::FiniteDifference};
}

/// Curvature of the Gibbs connection by the same finite-difference stencil.
/// Analytically zero (the connection is exact); the returned value measures
/// the stencil's truncation error only.
inline double curvature_gibbs_fd(const Controls& c, double beta,
                                 double rel_step = 1e-4) {
  if (!(rel_step > 0.0))
    throw ValidationError("curvature_gibbs_fd: step > 0 required");
  const double h =
      rel_step * std::max({std::abs(c.omega), std::abs(c.g), 1.0});
  return detail::curl_fd(
      [&](const Controls& cc) { return connection_gibbs(cc, beta); }, c, h);
}

/// Curvature from the analytic mixed partials of the closed-form steady
/// state. With D = Gamma2 + omega^2/Gamma2 + g^2/Gamma1 and
/// u = omega^2/Gamma2^2:
///   F = (g*z0 / (2 D^2)) * [1 - u + g^2/(Gamma1*Gamma2)
///                           + 2*Gamma2*(1+u)/Gamma1].
inline CurvatureSample curvature_closed_form(const Controls& c,
                                             const BathSpec& b) {
  validate(b);
  const double d = b.gamma2 + c.omega * c.omega / b.gamma2 +
                   c.g * c.g / b.gamma1;
  const double u = c.omega * c.omega / (b.gamma2 * b.gamma2);
  const double f = c.g * b.z0 / (2.0 * d * d) *
                   (1.0 - u + c.g * c.g / (b.gamma1 * b.gamma2) +
                    2.0 * b.gamma2 * (1.0 + u) / b.gamma1);
  return {f, c, CurvatureMethod::ClosedForm};
}

namespace detail {

/// sin(phi) and cos(2*phi) built so that the first is exactly odd and the
/// second exactly even in phi, making downstream curvature values exactly
/// odd under phi -> -phi.
struct PhaseFactors {
  double sin_phi;
  double cos_two_phi;
};

inline PhaseFactors phase_factors(double phi) {
  const double s_abs = std::sin(std::abs(phi));
  return {std::copysign(s_abs, phi), 1.0 - 2.0 * s_abs * s_abs};
}

}  // namespace detail

/// Curvature written in triality variables and the coherence phase:
///   F = -C sin(phi) / (2 P Gamma1 Gamma2 z0)
///       * [Gamma2 C^2 + 2 Gamma2 P^2 - Gamma1 P^2 cos(2 phi)].
/// Both printed bracket forms (the one above and the triality-substituted
/// Gamma2 (1 - E^2 + P^2) - Gamma1 P^2 cos(2 phi)) are evaluated; they are
/// algebraically identical on the triality sphere, and a gross mismatch
/// means the input violates C^2 + P^2 + E^2 = 1.
/// On triality points of the pointer-basis steady state this reproduces
/// curvature_closed_form.
inline double curvature_phase_resolved(const TrialityPoint& t,
                                       const BathSpec& b) {
  validate(b);
  if (b.z0 == 0.0)
    throw ZeroPolarization("curvature_phase_resolved: z0 = 0");
  if (std::abs(t.predictability) < 1e-12)
    throw PredictabilityPole("curvature_phase_resolved: |P| < 1e-12");
  const auto [sin_phi, cos_two_phi] = detail::phase_factors(t.phase);
  const double c_sq = t.coherence * t.coherence;
  const double p_sq = t.predictability * t.predictability;
  const double e_sq = t.deficit * t.deficit;
  const double bracket =
      b.gamma2 * c_sq + 2.0 * b.gamma2 * p_sq - b.gamma1 * p_sq * cos_two_phi;
  const double bracket_triality =
      b.gamma2 * (1.0 - e_sq + p_sq) - b.gamma1 * p_sq * cos_two_phi;
  if (std::abs(bracket - bracket_triality) >
      1e-10 * std::max({1.0, std::abs(bracket), b.gamma2}))
    throw ValidationError(
        "curvature_phase_resolved: triality identity violated "
        "(C^2 + P^2 + E^2 != 1)");
  return -t.coherence * sin_phi /
         (2.0 * t.predictability * b.gamma1 * b.gamma2 * b.z0) * bracket;
}

/// Regularized curvature P * F_{omega g}, evaluated by the explicit product
/// form with no division by P; continuous through P = 0:
///   F~ = -C sin(phi) / (2 Gamma1 Gamma2 z0) * [bracket].
inline double regularized_curvature(const TrialityPoint& t,
                                    const BathSpec& b) {
  validate(b);
  if (b.z0 == 0.0) throw ZeroPolarization("regularized_curvature: z0 = 0");
  const auto [sin_phi, cos_two_phi] = detail::phase_factors(t.phase);
  const double c_sq = t.coherence * t.coherence;
  const double p_sq = t.predictability * t.predictability;
  const double bracket =
      b.gamma2 * c_sq + 2.0 * b.gamma2 * p_sq - b.gamma1 * p_sq * cos_two_phi;
  return -t.coherence * sin_phi / (2.0 * b.gamma1 * b.gamma2 * b.z0) * bracket;
}

/// The quadratic form controlling the sign of the weak-mismatch response:
/// Gamma2 C^2 + (2 Gamma2 - Gamma1) P^2. Positive definite for
/// Gamma1 < 2 Gamma2; changes sign across P^2/C^2 = Gamma2/(Gamma1-2*Gamma2)
/// when dephasing is strong (Gamma1 > 2 Gamma2).
inline double weak_mismatch_bracket(double coherence, double predictability,
                                    const BathSpec& b) {
  return b.gamma2 * coherence * coherence +
         (2.0 * b.gamma2 - b.gamma1) * predictability * predictability;
}

/// Linear response of the phase-resolved curvature to the mismatch angle:
/// dF/dphi at phi = 0 holding (C, P) fixed,
///   = -C / (2 P Gamma1 Gamma2 z0) * [Gamma2 C^2 + (2 Gamma2 - Gamma1) P^2].
inline double weak_mismatch_coefficient(double coherence,
                                        double predictability,
                                        const BathSpec& b) {
  validate(b);
  if (b.z0 == 0.0) throw ZeroPolarization("weak_mismatch_coefficient: z0 = 0");
  if (std::abs(predictability) < 1e-12)
    throw PredictabilityPole("weak_mismatch_coefficient: |P| < 1e-12");
  return -coherence /
         (2.0 * predictability * b.gamma1 * b.gamma2 * b.z0) *
         weak_mismatch_bracket(coherence, predictability, b);
}

}  // namespace blochwork
