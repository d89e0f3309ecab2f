#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "blochwork/work_geometry.hpp"
#include "oracle_helpers.hpp"

using namespace blochwork;

namespace {
constexpr double kPi = std::numbers::pi;

TrialityPoint ness_triality(const Controls& c, const BathSpec& b) {
  return to_triality(ness_closed_form(c, b));
}
}  // namespace

TEST_CASE("pointer-basis work connection", "[work_geometry]") {
  SECTION("reference point halves the steady-state components") {
    const ConnectionValue a = connection_pointer({1, 1}, {1, 1, 1});
    CHECK(a.a_omega == Catch::Approx(1.0 / 3).margin(1e-15));
    CHECK(a.a_g == Catch::Approx(1.0 / 6).margin(1e-15));
  }
  SECTION("no drive") {
    const ConnectionValue a = connection_pointer({0.7, 0}, {1, 1, 0.4});
    CHECK(a.a_omega == Catch::Approx(0.2).margin(1e-15));
    CHECK(a.a_g == 0.0);
  }
  SECTION("linear in the target polarization") {
    const ConnectionValue a = connection_pointer({1, 1}, {1, 1, -1});
    CHECK(a.a_omega == Catch::Approx(-1.0 / 3).margin(1e-15));
    CHECK(a.a_g == Catch::Approx(-1.0 / 6).margin(1e-15));
  }
}

TEST_CASE("thermal work connection", "[work_geometry]") {
  SECTION("low-temperature sigma_z ground state") {
    const ConnectionValue a = connection_gibbs({1, 0}, 1e4);
    CHECK(a.a_omega == Catch::Approx(-0.5).margin(1e-12));
    CHECK(a.a_g == 0.0);
  }
  SECTION("degenerate Hamiltonian") {
    const ConnectionValue a = connection_gibbs({0, 0}, 1.7);
    CHECK(a.a_omega == 0.0);
    CHECK(a.a_g == 0.0);
  }
  SECTION("reference value") {
    const ConnectionValue a = connection_gibbs({3, 4}, 1.0);
    CHECK(a.a_omega == Catch::Approx(-std::tanh(2.5) / 10 * 3).margin(1e-14));
    CHECK(a.a_g == Catch::Approx(-std::tanh(2.5) / 10 * 4).margin(1e-14));
  }
  SECTION("equals the central-difference gradient of the potential") {
    for (const Controls& c : {Controls{3, 4}, {1, 1}, {-0.8, 0.6}})
      for (double beta : {0.5, 1.0, 2.0}) {
        const double h = 1e-5 * std::max({std::abs(c.omega), std::abs(c.g),
                                          1.0});
        const double grad_omega =
            (free_energy_gibbs({c.omega + h, c.g}, beta) -
             free_energy_gibbs({c.omega - h, c.g}, beta)) /
            (2 * h);
        const double grad_g = (free_energy_gibbs({c.omega, c.g + h}, beta) -
                               free_energy_gibbs({c.omega, c.g - h}, beta)) /
                              (2 * h);
        const ConnectionValue a = connection_gibbs(c, beta);
        CHECK(std::abs(a.a_omega - grad_omega) < 1e-8);
        CHECK(std::abs(a.a_g - grad_g) < 1e-8);
      }
  }
}

TEST_CASE("thermal potential", "[work_geometry]") {
  CHECK(free_energy_gibbs({0, 0}, 1.0) ==
        Catch::Approx(-std::log(2.0)).margin(1e-15));
  CHECK(free_energy_gibbs({3, 4}, 1.0) ==
        Catch::Approx(-std::log(2.0 * std::cosh(2.5))).margin(1e-14));
  CHECK(free_energy_gibbs({1, 0}, 2.0) ==
        Catch::Approx(-0.5 * std::log(2.0 * std::cosh(1.0))).margin(1e-14));
  CHECK_THROWS_AS(free_energy_gibbs({1, 1}, 0.0), ValidationError);
  SECTION("large beta does not overflow") {
    const double f = free_energy_gibbs({3, 4}, 500.0);
    CHECK(std::isfinite(f));
    CHECK(f == Catch::Approx(-2.5).margin(1e-12));  // ground-state energy
  }
}

TEST_CASE("curvature by finite differences", "[work_geometry]") {
  SECTION("reference value 5/18") {
    const CurvatureSample s = curvature_fd({1, 1}, {1, 1, 1});
    CHECK(s.method == CurvatureMethod::FiniteDifference);
    CHECK(s.f_omega_g == Catch::Approx(5.0 / 18).margin(1e-8));
  }
  SECTION("vanishes with the drive") {
    const CurvatureSample s = curvature_fd({1.3, 0}, {0.8, 1.1, 0.9});
    CHECK(std::abs(s.f_omega_g) < 1e-10);
  }
  SECTION("the thermal connection is flat") {
    for (const Controls& c : {Controls{1, 1}, {3, 4}, {-0.7, 0.4}})
      for (double beta : {0.3, 1.0, 5.0})
        CHECK(std::abs(curvature_gibbs_fd(c, beta)) < 1e-8);
  }
}

TEST_CASE("curvature in closed form", "[work_geometry]") {
  SECTION("reference value 5/18") {
    const CurvatureSample s = curvature_closed_form({1, 1}, {1, 1, 1});
    CHECK(s.method == CurvatureMethod::ClosedForm);
    CHECK(s.f_omega_g == Catch::Approx(5.0 / 18).margin(1e-15));
  }
  SECTION("odd in the drive") {
    CHECK(curvature_closed_form({1, -1}, {1, 1, 1}).f_omega_g ==
          Catch::Approx(-5.0 / 18).margin(1e-15));
  }
  SECTION("proportional to the target polarization") {
    CHECK(curvature_closed_form({1, 1}, {1, 1, 0}).f_omega_g == 0.0);
  }
  SECTION("agrees with finite differences on the grid") {
    for (const auto& [c, b] : oracle::ness_grid()) {
      const double closed = curvature_closed_form(c, b).f_omega_g;
      const double fd = curvature_fd(c, b).f_omega_g;
      CHECK(std::abs(fd - closed) <= 1e-6 * std::max(1.0, std::abs(closed)));
    }
  }
}

TEST_CASE("phase-resolved curvature", "[work_geometry]") {
  const BathSpec b111{1, 1, 1};
  SECTION("reference triality point reproduces 5/18") {
    const TrialityPoint t{std::sqrt(2.0) / 3, 2.0 / 3, std::sqrt(1.0 / 3),
                          -kPi / 4};
    CHECK(curvature_phase_resolved(t, b111) ==
          Catch::Approx(5.0 / 18).margin(1e-14));
  }
  SECTION("identically zero in the aligned limit") {
    for (const BlochVector& r : oracle::ball_samples(40)) {
      TrialityPoint t = to_triality(r);
      if (std::abs(t.predictability) < 1e-6) continue;
      t.phase = 0.0;
      CHECK(curvature_phase_resolved(t, b111) == 0.0);
    }
  }
  SECTION("exactly odd in the phase") {
    for (const BlochVector& r : oracle::ball_samples(40)) {
      const TrialityPoint t = to_triality(r);
      if (std::abs(t.predictability) < 1e-6 || t.coherence < 1e-12) continue;
      TrialityPoint minus = t;
      minus.phase = -t.phase;
      CHECK(curvature_phase_resolved(minus, b111) ==
            -curvature_phase_resolved(t, b111));
    }
  }
  SECTION("maximal mismatch closed form") {
    // cos(2 phi) = -1 turns the bracket into Gamma2 C^2 + (2 Gamma2 +
    // Gamma1) P^2.
    const TrialityPoint t{0.6, 0.48, std::sqrt(1 - 0.36 - 0.2304), kPi / 2};
    const BathSpec b{0.7, 1.2, 0.5};
    const double want = -0.6 / (2 * 0.48 * 0.7 * 1.2 * 0.5) *
                        (1.2 * 0.36 + 2 * 1.2 * 0.2304 + 0.7 * 0.2304);
    CHECK(curvature_phase_resolved(t, b) ==
          Catch::Approx(want).margin(1e-14));
    // Cross-check through the regularized route.
    CHECK(regularized_curvature(t, b) ==
          Catch::Approx(0.48 * want).margin(1e-14));
  }
  SECTION("matches the control-space curvature on the steady-state manifold") {
    for (const auto& [c, b] : oracle::ness_grid()) {
      const TrialityPoint t = ness_triality(c, b);
      if (std::abs(t.predictability) < 1e-3) continue;
      CHECK(std::abs(curvature_phase_resolved(t, b) -
                     curvature_closed_form(c, b).f_omega_g) < 1e-10);
    }
  }
  SECTION("bracket forms agree on the triality sphere") {
    // Both printed forms are identical once C^2 + P^2 + E^2 = 1; off the
    // sphere the evaluation refuses to pick one.
    for (const BlochVector& r : oracle::ball_samples(60)) {
      const TrialityPoint t = to_triality(r);
      if (std::abs(t.predictability) < 1e-6) continue;
      const double c_sq = t.coherence * t.coherence;
      const double p_sq = t.predictability * t.predictability;
      const double e_sq = t.deficit * t.deficit;
      const double cos2 = 1 - 2 * std::pow(std::sin(t.phase), 2);
      const double b1 = 1.3 * c_sq + 2 * 1.3 * p_sq - 0.6 * p_sq * cos2;
      const double b2 = 1.3 * (1 - e_sq + p_sq) - 0.6 * p_sq * cos2;
      CHECK(std::abs(b1 - b2) < 1e-14);
    }
    TrialityPoint off{0.9, 0.9, 0.9, 0.3};
    CHECK_THROWS_AS(curvature_phase_resolved(off, b111), ValidationError);
  }
  SECTION("poles rejected") {
    CHECK_THROWS_AS(
        curvature_phase_resolved({0.6, 0.0, 0.8, kPi / 2}, b111),
        PredictabilityPole);
    CHECK_THROWS_AS(
        curvature_phase_resolved({0.6, 0.48, std::sqrt(1 - 0.36 - 0.2304),
                                  kPi / 2},
                                 {1, 1, 0}),
        ZeroPolarization);
  }
}

TEST_CASE("regularized curvature", "[work_geometry]") {
  const BathSpec b111{1, 1, 1};
  SECTION("product of predictability and the reference curvature") {
    const TrialityPoint t{std::sqrt(2.0) / 3, 2.0 / 3, std::sqrt(1.0 / 3),
                          -kPi / 4};
    CHECK(regularized_curvature(t, b111) ==
          Catch::Approx(5.0 / 27).margin(1e-14));
  }
  SECTION("continuous through P = 0") {
    // At P = 0 the product form reduces to -C sin(phi) Gamma2 C^2 /
    // (2 Gamma1 Gamma2 z0).
    const double coh = 0.8, phi = 0.9;
    const TrialityPoint t{coh, 0.0, 0.6, phi};
    const BathSpec b{0.7, 1.1, 0.4};
    const double want =
        -coh * std::sin(phi) * 1.1 * coh * coh / (2 * 0.7 * 1.1 * 0.4);
    CHECK(regularized_curvature(t, b) == Catch::Approx(want).margin(1e-14));
    // Limit of P * F as P -> 0 from both sides.
    for (double p : {1e-7, -1e-7}) {
      const double e = std::sqrt(1 - coh * coh - p * p);
      const double f = curvature_phase_resolved({coh, p, e, phi}, b);
      CHECK(std::abs(p * f - regularized_curvature({coh, p, e, phi}, b)) <
            1e-13);
    }
  }
  SECTION("vanishes without coherence") {
    CHECK(regularized_curvature({0.0, 0.6, 0.8, 1.0}, b111) == 0.0);
  }
  SECTION("zero polarization rejected") {
    CHECK_THROWS_AS(regularized_curvature({0.6, 0.0, 0.8, 1.0}, {1, 1, 0}),
                    ZeroPolarization);
  }
}

TEST_CASE("weak-mismatch expansion", "[work_geometry]") {
  const BathSpec b111{1, 1, 1};
  SECTION("reference coefficient") {
    CHECK(weak_mismatch_coefficient(std::sqrt(2.0) / 3, 2.0 / 3, b111) ==
          Catch::Approx(-std::sqrt(2.0) / 6).margin(1e-14));
  }
  SECTION("agrees with a phase finite difference") {
    const double cases[][2] = {{std::sqrt(2.0) / 3, 2.0 / 3},
                               {0.3, -0.8},
                               {0.9, 0.2}};
    const BathSpec baths[] = {{1, 1, 1}, {3, 1, 0.5}, {0.4, 1.7, -0.8}};
    for (const auto& cp : cases)
      for (const BathSpec& b : baths) {
        const double coh = cp[0], pred = cp[1];
        const double e = std::sqrt(1 - coh * coh - pred * pred);
        const double delta = 1e-5;
        const double fd =
            (curvature_phase_resolved({coh, pred, e, delta}, b) -
             curvature_phase_resolved({coh, pred, e, -delta}, b)) /
            (2 * delta);
        CHECK(std::abs(weak_mismatch_coefficient(coh, pred, b) - fd) < 1e-8);
      }
  }
  SECTION("bracket cancels at Gamma1 = 2 Gamma2 with no coherence") {
    CHECK(weak_mismatch_bracket(0.0, 0.77, {2, 1, 0.5}) == 0.0);
  }
  SECTION("positive definite below the dephasing threshold") {
    for (const BathSpec& b :
         {BathSpec{1, 1, 1}, {0.5, 1, 1}, {1.9, 1, 1}, {0.3, 0.2, 0.5}}) {
      REQUIRE(b.gamma1 < 2 * b.gamma2);
      for (int k = 0; k <= 64; ++k) {
        const double theta = kPi * k / 64.0;
        CHECK(weak_mismatch_bracket(std::cos(theta), std::sin(theta), b) >
              0.0);
      }
    }
  }
  SECTION("sign-change locus under strong dephasing") {
    // Root-find the bracket zero along unit-circle rays in (C, P) and
    // compare with P^2/C^2 = Gamma2 / (Gamma1 - 2 Gamma2).
    for (const BathSpec& b : {BathSpec{3, 1, 1}, {2.5, 0.7, -0.4}}) {
      REQUIRE(b.gamma1 > 2 * b.gamma2);
      double lo = 1e-3, hi = kPi / 2 - 1e-3;
      REQUIRE(weak_mismatch_bracket(std::cos(lo), std::sin(lo), b) > 0.0);
      REQUIRE(weak_mismatch_bracket(std::cos(hi), std::sin(hi), b) < 0.0);
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (weak_mismatch_bracket(std::cos(mid), std::sin(mid), b) > 0.0
             ? lo
             : hi) = mid;
      }
      const double theta = 0.5 * (lo + hi);
      const double ratio = std::pow(std::tan(theta), 2);
      CHECK(std::abs(ratio - b.gamma2 / (b.gamma1 - 2 * b.gamma2)) < 1e-10);
    }
  }
  SECTION("poles rejected") {
    CHECK_THROWS_AS(weak_mismatch_coefficient(0.5, 0.0, b111),
                    PredictabilityPole);
    CHECK_THROWS_AS(weak_mismatch_coefficient(0.5, 0.5, {1, 1, 0}),
                    ZeroPolarization);
  }
}
