#pragma once

// Charts on the triality quarter-sphere {C >= 0, E >= 0}, grid sampling of
// the regularized curvature field at fixed coherence phase, extremum
// location, and a renderable mesh of the painted quarter-sphere.
//
// Chart: eta in [-pi/2, pi/2] is the azimuth around the coherence-
// predictability circle, lambda in [0, pi/2] the latitude with E = sin
// lambda. Embedding: C = cos(lambda) cos(eta), P = cos(lambda) sin(eta),
// so eta = 0 is the P = 0 symmetry meridian and lambda = 0 the pure-state
// boundary.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <thread>
#include <vector>

#include "blochwork/fields.hpp"
#include "blochwork/work_geometry.hpp"

namespace blochwork {

struct ChartPoint {
  double eta = 0.0;     ///< azimuth, radians, in [-pi/2, pi/2]
  double lambda = 0.0;  ///< latitude, radians, in [0, pi/2]
};

/// Embed a chart point on the unit triality sphere; the coherence phase is
/// an independent coordinate supplied by the caller. Trig factors below
/// 1e-15 are snapped to zero so chart boundaries land exactly on C = 0,
/// E = 0, or the pole.
inline TrialityPoint chart_to_triality(const ChartPoint& p, double phi) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (!(p.lambda >= -1e-12 && p.lambda <= half_pi + 1e-12))
    throw ValidationError("ChartPoint: lambda must lie in [0, pi/2]");
  if (!(p.eta >= -half_pi - 1e-12 && p.eta <= half_pi + 1e-12))
    throw ValidationError("ChartPoint: eta must lie in [-pi/2, pi/2]");
  // Snap slack covers the validation tolerance above, so boundary points
  // never acquire a wrong-signed C or E from rounding.
  const auto snap = [](double v) { return (std::abs(v) < 2e-12) ? 0.0 : v; };
  const double cos_lambda = snap(std::cos(p.lambda));
  const double cos_eta = snap(std::cos(p.eta));
  const double sin_eta = snap(std::sin(p.eta));
  TrialityPoint t;
  t.coherence = cos_lambda * cos_eta;
  t.predictability = cos_lambda * sin_eta;
  t.deficit = std::max(0.0, snap(std::sin(p.lambda)));
  t.phase = phi;
  return t;
}

/// Chart inverse; round-trips chart_to_triality to within fp rounding.
inline ChartPoint triality_to_chart(const TrialityPoint& t) {
  return {std::atan2(t.predictability, t.coherence),
          std::asin(std::min(1.0, t.deficit))};
}

/// eta samples include both endpoints and are exactly mirror-symmetric
/// about 0; lambda samples are cell-centered so no node sits on a chart
/// edge.
inline std::vector<double> chart_eta_samples(int n_eta) {
  std::vector<double> eta(n_eta);
  const double half_pi = std::numbers::pi / 2.0;
  for (int i = 0; i < n_eta / 2; ++i) {
    const double v = -half_pi + i * std::numbers::pi / (n_eta - 1);
    eta[i] = v;
    eta[n_eta - 1 - i] = -v;
  }
  if (n_eta % 2 == 1) eta[n_eta / 2] = 0.0;
  return eta;
}

inline std::vector<double> chart_lambda_samples(int n_lambda) {
  std::vector<double> lambda(n_lambda);
  for (int j = 0; j < n_lambda; ++j)
    lambda[j] = (j + 0.5) * (std::numbers::pi / 2.0) / n_lambda;
  return lambda;
}

/// Sample the regularized curvature P*F over the chart at fixed phase.
/// The product form is pole-free, so no nodes are masked. axis1 = lambda
/// (rows), axis2 = eta (columns, fastest-varying).
inline ScalarField2D paint_regularized_curvature(double phi,
                                                 const BathSpec& b,
                                                 int n_eta, int n_lambda,
                                                 unsigned threads = 1) {
  validate(b);
  if (b.z0 == 0.0)
    throw ZeroPolarization("paint_regularized_curvature: z0 = 0");
  if (n_eta < 32 || n_lambda < 16)
    throw ValidationError(
        "paint_regularized_curvature: grid must be at least 32 x 16");
  ScalarField2D field = ScalarField2D::zeros(
      {"lambda", chart_lambda_samples(n_lambda)},
      {"eta", chart_eta_samples(n_eta)});
  const auto paint_rows = [&](std::size_t row_begin, std::size_t row_end) {
    for (std::size_t j = row_begin; j < row_end; ++j)
      for (std::size_t i = 0; i < field.cols(); ++i) {
        const TrialityPoint t = chart_to_triality(
            {field.axis2.values[i], field.axis1.values[j]}, phi);
        field.at(j, i) = regularized_curvature(t, b);
      }
  };
  if (threads <= 1) {
    paint_rows(0, field.rows());
  } else {
    std::vector<std::thread> pool;
    const std::size_t n = field.rows();
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned k = 0; k < threads; ++k) {
      const std::size_t lo = std::min(n, k * chunk);
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo < hi) pool.emplace_back(paint_rows, lo, hi);
    }
    for (std::thread& th : pool) th.join();
  }
  return field;
}

struct Extremum {
  std::size_t index1 = 0;     ///< row (axis1) index
  std::size_t index2 = 0;     ///< column (axis2) index
  double axis1_value = 0.0;
  double axis2_value = 0.0;
  double value = 0.0;
  bool is_maximum = false;
  bool interior = false;  ///< at least 2 nodes away from every boundary
};

/// Strict local extrema by 8-neighbor comparison. Boundary nodes are
/// compared against their existing neighbors and flagged non-interior.
/// Masked nodes are neither candidates nor comparison partners.
inline std::vector<Extremum> locate_extrema(const ScalarField2D& field) {
  field.check_consistent();
  std::vector<Extremum> out;
  const std::size_t n1 = field.rows(), n2 = field.cols();
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      if (field.masked(i, j)) continue;
      const double v = field.at(i, j);
      bool is_max = true, is_min = true;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const auto ii = static_cast<std::ptrdiff_t>(i) + di;
          const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
          if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(n1) ||
              jj >= static_cast<std::ptrdiff_t>(n2))
            continue;
          const auto ui = static_cast<std::size_t>(ii);
          const auto uj = static_cast<std::size_t>(jj);
          if (field.masked(ui, uj)) continue;
          const double w = field.at(ui, uj);
          if (w >= v) is_max = false;
          if (w <= v) is_min = false;
        }
      }
      if (!is_max && !is_min) continue;
      const bool interior = i >= 2 && j >= 2 && i + 2 < n1 && j + 2 < n2;
      out.push_back({i, j, field.axis1.values[i], field.axis2.values[j], v,
                     is_max, interior});
    }
  }
  return out;
}

/// Triangle mesh of the painted quarter-sphere for offline rendering.
struct QuarterSphereMesh {
  struct Vertex {
    double coherence = 0.0;
    double predictability = 0.0;
    double deficit = 0.0;
    double value = 0.0;  ///< regularized curvature at the vertex
  };
  std::vector<Vertex> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;
  /// Vertex indices tracing the pure-state boundary E = 0 (the dashed
  /// meridian of the painted sphere).
  std::vector<std::uint32_t> pure_state_boundary;
};

/// Build the mesh on an (n_eta x n_lambda) grid including both endpoints of
/// both chart axes. Coincident vertices at the E = 1 pole are deduplicated
/// so the pole appears exactly once; degenerate triangles are dropped.
inline QuarterSphereMesh quarter_sphere_vertices(int n_eta, int n_lambda,
                                                 double phi,
                                                 const BathSpec& b) {
  validate(b);
  if (b.z0 == 0.0) throw ZeroPolarization("quarter_sphere_vertices: z0 = 0");
  if (n_eta < 2 || n_lambda < 2)
    throw ValidationError("quarter_sphere_vertices: grid must be >= 2 x 2");
  const double half_pi = std::numbers::pi / 2.0;
  QuarterSphereMesh mesh;
  std::vector<std::uint32_t> index_of(
      static_cast<std::size_t>(n_eta) * n_lambda);
  std::int64_t pole_index = -1;
  for (int j = 0; j < n_lambda; ++j) {
    const double lambda = half_pi * j / (n_lambda - 1);
    for (int i = 0; i < n_eta; ++i) {
      const double eta = -half_pi + std::numbers::pi * i / (n_eta - 1);
      const TrialityPoint t = chart_to_triality({eta, lambda}, phi);
      const bool at_pole = t.coherence == 0.0 && t.predictability == 0.0 &&
                           t.deficit == 1.0;
      if (at_pole && pole_index >= 0) {
        index_of[static_cast<std::size_t>(j) * n_eta + i] =
            static_cast<std::uint32_t>(pole_index);
        continue;
      }
      const auto idx = static_cast<std::uint32_t>(mesh.vertices.size());
      mesh.vertices.push_back({t.coherence, t.predictability, t.deficit,
                               regularized_curvature(t, b)});
      if (at_pole) pole_index = idx;
      index_of[static_cast<std::size_t>(j) * n_eta + i] = idx;
    }
  }
  const auto vertex_at = [&](int i, int j) {
    return index_of[static_cast<std::size_t>(j) * n_eta + i];
  };
  for (int j = 0; j + 1 < n_lambda; ++j) {
    for (int i = 0; i + 1 < n_eta; ++i) {
      const std::uint32_t q00 = vertex_at(i, j), q10 = vertex_at(i + 1, j);
      const std::uint32_t q01 = vertex_at(i, j + 1),
                          q11 = vertex_at(i + 1, j + 1);
      const auto push = [&](std::uint32_t a, std::uint32_t bb,
                            std::uint32_t c) {
        if (a != bb && bb != c && a != c) mesh.faces.push_back({a, bb, c});
      };
      push(q00, q10, q11);
      push(q00, q11, q01);
    }
  }
  for (int i = 0; i < n_eta; ++i)
    mesh.pure_state_boundary.push_back(vertex_at(i, 0));
  return mesh;
}

}  // namespace blochwork
