#pragma once

// Closed paths in control space, holonomic cyclic work by line integration,
// curvature flux through enclosed regions, the Stokes self-consistency
// residual, and dynamical work in the slow-driving limit.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "blochwork/work_geometry.hpp"

namespace blochwork {

enum class PathKind { Rectangle, Ellipse, Polyline };
enum class Orientation { CCW, CW };
enum class Schedule { UniformSpeed, SmoothstepReparam };

/// A closed loop in the (omega, g) control plane. Rectangle and Ellipse are
/// described by center and half-extents; Polyline by an explicit closed
/// vertex list (first vertex repeated at the end).
struct ControlPath {
  PathKind kind = PathKind::Rectangle;
  Controls center{};
  double extent_omega = 0.0;  ///< half-width (Rectangle) or semi-axis (Ellipse)
  double extent_g = 0.0;
  std::vector<Controls> vertices;  ///< Polyline only
  Orientation orientation = Orientation::CCW;
  double samples_per_unit = 256.0;  ///< quadrature density along the path

  static ControlPath rectangle(Controls center, double half_width_omega,
                               double half_width_g,
                               Orientation o = Orientation::CCW,
                               double samples_per_unit = 256.0) {
    if (!(half_width_omega > 0.0) || !(half_width_g > 0.0))
      throw ValidationError("ControlPath: rectangle half-widths must be > 0");
    return {PathKind::Rectangle, center, half_width_omega, half_width_g,
            {},       o,      samples_per_unit};
  }

  static ControlPath ellipse(Controls center, double semi_axis_omega,
                             double semi_axis_g,
                             Orientation o = Orientation::CCW,
                             double samples_per_unit = 256.0) {
    if (!(semi_axis_omega > 0.0) || !(semi_axis_g > 0.0))
      throw ValidationError("ControlPath: ellipse semi-axes must be > 0");
    return {PathKind::Ellipse, center, semi_axis_omega, semi_axis_g,
            {},     o,      samples_per_unit};
  }

  static ControlPath polyline(std::vector<Controls> vertices,
                              Orientation o = Orientation::CCW,
                              double samples_per_unit = 256.0) {
    ControlPath p;
    p.kind = PathKind::Polyline;
    p.vertices = std::move(vertices);
    p.orientation = o;
    p.samples_per_unit = samples_per_unit;
    return p;
  }
};

/// Cyclic work along a closed path plus a step-halving error estimate.
struct WorkResult {
  double w_cyc = 0.0;
  std::size_t quadrature_nodes = 0;
  double estimated_error = 0.0;
};

/// A time realization of a control loop: one traversal per period.
struct DriveProtocol {
  ControlPath path;
  double period = 0.0;
  Schedule schedule = Schedule::SmoothstepReparam;
};

struct AdiabaticRow {
  double period = 0.0;
  double work = 0.0;
  double abs_error = 0.0;  ///< |work - quasistatic work|
};

struct AdiabaticStudy {
  std::vector<AdiabaticRow> rows;
  std::optional<double> slope;  ///< log-log slope of error vs period
  double quasistatic_work = 0.0;
};

namespace detail {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule by Newton iteration on the Legendre recurrence.
inline GaussRule make_gauss_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

inline const GaussRule& gauss32() {
  static const GaussRule rule = make_gauss_rule(32);
  return rule;
}

struct Segment {
  Controls a, b;
};

inline double segment_length(const Segment& s) {
  return std::hypot(s.b.omega - s.a.omega, s.b.g - s.a.g);
}

inline std::vector<Segment> rectangle_segments(const ControlPath& p) {
  const double cw = p.center.omega, cg = p.center.g;
  const double hw = p.extent_omega, hg = p.extent_g;
  std::vector<Controls> corner = {{cw - hw, cg - hg},
                                  {cw + hw, cg - hg},
                                  {cw + hw, cg + hg},
                                  {cw - hw, cg + hg},
                                  {cw - hw, cg - hg}};
  if (p.orientation == Orientation::CW)
    std::reverse(corner.begin(), corner.end());
  std::vector<Segment> segs;
  for (std::size_t k = 0; k + 1 < corner.size(); ++k)
    segs.push_back({corner[k], corner[k + 1]});
  return segs;
}

inline std::vector<Segment> polyline_segments(const ControlPath& p) {
  if (p.vertices.size() < 2 ||
      p.vertices.front().omega != p.vertices.back().omega ||
      p.vertices.front().g != p.vertices.back().g)
    throw OpenPath("ControlPath: polyline must end at its first vertex");
  std::vector<Controls> v = p.vertices;
  if (p.orientation == Orientation::CW) std::reverse(v.begin(), v.end());
  std::vector<Segment> segs;
  for (std::size_t k = 0; k + 1 < v.size(); ++k)
    segs.push_back({v[k], v[k + 1]});
  return segs;
}

/// Composite trapezoid of A . dl over one straight segment.
template <typename ConnFn>
double trapezoid_segment(ConnFn&& conn, const Segment& s, double spu,
                         std::size_t& node_count) {
  const double dw = s.b.omega - s.a.omega;
  const double dg = s.b.g - s.a.g;
  const double len = segment_length(s);
  const int n = std::max(1, static_cast<int>(std::ceil(len * spu)));
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const Controls pt{s.a.omega + t * dw, s.a.g + t * dg};
    const ConnectionValue a = conn(pt);
    const double f = a.a_omega * dw + a.a_g * dg;
    acc += (i == 0 || i == n) ? 0.5 * f : f;
  }
  node_count += static_cast<std::size_t>(n) + 1;
  return acc / n;
}

/// 32-point Gauss per subsegment of A . dl over one straight segment.
template <typename ConnFn>
double gauss_segment(ConnFn&& conn, const Segment& s, double spu,
                     std::size_t& node_count) {
  const GaussRule& rule = gauss32();
  const double dw = s.b.omega - s.a.omega;
  const double dg = s.b.g - s.a.g;
  const double len = segment_length(s);
  const int m = std::max(1, static_cast<int>(std::ceil(len * spu / 32.0)));
  double acc = 0.0;
  for (int seg = 0; seg < m; ++seg) {
    const double t0 = static_cast<double>(seg) / m;
    const double t1 = static_cast<double>(seg + 1) / m;
    const double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double t = mid + half * rule.nodes[q];
      const Controls pt{s.a.omega + t * dw, s.a.g + t * dg};
      const ConnectionValue a = conn(pt);
      acc += rule.weights[q] * half * (a.a_omega * dw + a.a_g * dg);
    }
    node_count += rule.nodes.size();
  }
  return acc;
}

/// Gauss quadrature of A . dl around an ellipse, split into angular arcs.
template <typename ConnFn>
double gauss_ellipse(ConnFn&& conn, const ControlPath& p, double spu,
                     std::size_t& node_count) {
  const GaussRule& rule = gauss32();
  const double a = p.extent_omega, b = p.extent_g;
  // Ramanujan perimeter estimate, used only to pick the arc count.
  const double perimeter =
      std::numbers::pi *
      (3.0 * (a + b) - std::sqrt((3.0 * a + b) * (a + 3.0 * b)));
  const int m = std::max(8, static_cast<int>(std::ceil(perimeter * spu / 32.0)));
  const double dir = (p.orientation == Orientation::CCW) ? 1.0 : -1.0;
  double acc = 0.0;
  for (int seg = 0; seg < m; ++seg) {
    const double s0 = 2.0 * std::numbers::pi * seg / m;
    const double s1 = 2.0 * std::numbers::pi * (seg + 1) / m;
    const double mid = 0.5 * (s0 + s1), half = 0.5 * (s1 - s0);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = mid + half * rule.nodes[q];
      const double theta = dir * s;
      const Controls pt{p.center.omega + a * std::cos(theta),
                        p.center.g + b * std::sin(theta)};
      const ConnectionValue av = conn(pt);
      const double dwds = -a * std::sin(theta) * dir;
      const double dgds = b * std::cos(theta) * dir;
      acc += rule.weights[q] * half * (av.a_omega * dwds + av.a_g * dgds);
    }
    node_count += rule.nodes.size();
  }
  return acc;
}

template <typename ConnFn>
std::pair<double, std::size_t> line_integral(ConnFn&& conn,
                                             const ControlPath& p,
                                             double spu) {
  std::size_t nodes = 0;
  double acc = 0.0;
  switch (p.kind) {
    case PathKind::Rectangle:
      for (const Segment& s : rectangle_segments(p))
        acc += gauss_segment(conn, s, spu, nodes);
      break;
    case PathKind::Ellipse:
      acc = gauss_ellipse(conn, p, spu, nodes);
      break;
    case PathKind::Polyline:
      for (const Segment& s : polyline_segments(p))
        acc += trapezoid_segment(conn, s, spu, nodes);
      break;
  }
  return {acc, nodes};
}

template <typename ConnFn>
WorkResult loop_work(ConnFn&& conn, const ControlPath& path) {
  const auto [coarse, coarse_nodes] =
      line_integral(conn, path, path.samples_per_unit);
  const auto [fine, fine_nodes] =
      line_integral(conn, path, 2.0 * path.samples_per_unit);
  (void)coarse_nodes;
  return {fine, fine_nodes, std::abs(fine - coarse)};
}

}  // namespace detail

/// Quasistatic cyclic work W_cyc = contour integral of the pointer-basis
/// work connection: (1/2) closed-integral (z d(omega) + x d(g)).
/// Gauss quadrature on Rectangle/Ellipse segments, composite trapezoid on
/// Polyline edges. CCW orientation matches the sign of the curvature flux.
inline WorkResult loop_work_quasistatic(const ControlPath& path,
                                        const BathSpec& b) {
  validate(b);
  return detail::loop_work(
      [&](const Controls& c) { return connection_pointer(c, b); }, path);
}

/// Cyclic work of the Hamiltonian-aligned (Gibbs) connection. The connection
/// is exact, so the result is bounded by quadrature error only.
inline WorkResult loop_work_gibbs(const ControlPath& path, double beta) {
  return detail::loop_work(
      [&](const Controls& c) { return connection_gibbs(c, beta); }, path);
}

/// Curvature flux through the region enclosed by a Rectangle (composite
/// Simpson on an n1 x n2 node grid) or Ellipse (Gauss in radius, uniform in
/// angle), signed by orientation. Polyline regions are not supported.
inline double curvature_flux(const ControlPath& path, const BathSpec& b,
                             int n_omega = 64, int n_g = 64) {
  validate(b);
  if (path.kind == PathKind::Polyline)
    throw UnsupportedRegion("curvature_flux: polyline regions not supported");
  if (n_omega < 16 || n_g < 16)
    throw ValidationError("curvature_flux: grid must be at least 16 x 16");
  const double sign = (path.orientation == Orientation::CCW) ? 1.0 : -1.0;

  if (path.kind == PathKind::Rectangle) {
    const int nx = (n_omega % 2 == 0) ? n_omega + 1 : n_omega;
    const int ny = (n_g % 2 == 0) ? n_g + 1 : n_g;
    const double ax = path.center.omega - path.extent_omega;
    const double bx = path.center.omega + path.extent_omega;
    const double ay = path.center.g - path.extent_g;
    const double by = path.center.g + path.extent_g;
    const double hx = (bx - ax) / (nx - 1), hy = (by - ay) / (ny - 1);
    const auto simpson_w = [](int i, int n) {
      if (i == 0 || i == n - 1) return 1.0;
      return (i % 2 == 1) ? 4.0 : 2.0;
    };
    double acc = 0.0;
    for (int i = 0; i < nx; ++i) {
      const double wx = simpson_w(i, nx) * hx / 3.0;
      for (int j = 0; j < ny; ++j) {
        const double wy = simpson_w(j, ny) * hy / 3.0;
        const Controls c{ax + i * hx, ay + j * hy};
        acc += wx * wy * curvature_closed_form(c, b).f_omega_g;
      }
    }
    return sign * acc;
  }

  // Ellipse: map to polar coordinates, Jacobian a*b*rho.
  const int n_theta = std::max(16, 2 * (n_omega + n_g));
  const int n_r = std::max(16, std::max(n_omega, n_g));
  const detail::GaussRule radial = detail::make_gauss_rule(n_r);
  const double a = path.extent_omega, bb = path.extent_g;
  double acc = 0.0;
  for (int k = 0; k < n_theta; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n_theta;
    const double ct = std::cos(theta), st = std::sin(theta);
    for (int q = 0; q < n_r; ++q) {
      const double rho = 0.5 * (radial.nodes[q] + 1.0);
      const double w = 0.5 * radial.weights[q] * 2.0 * std::numbers::pi /
                       n_theta * a * bb * rho;
      const Controls c{path.center.omega + a * rho * ct,
                       path.center.g + bb * rho * st};
      acc += w * curvature_closed_form(c, b).f_omega_g;
    }
  }
  return sign * acc;
}

/// Relative mismatch between the line integral of the connection and the
/// curvature flux through the enclosed region:
///   |W_loop - W_flux| / max(|W_loop|, |W_flux|, 1e-15).
inline double stokes_residual(const ControlPath& path, const BathSpec& b,
                              int n_omega = 64, int n_g = 64) {
  const double loop = loop_work_quasistatic(path, b).w_cyc;
  const double flux = curvature_flux(path, b, n_omega, n_g);
  return std::abs(loop - flux) /
         std::max({std::abs(loop), std::abs(flux), 1e-15});
}

/// Gibbs analog of the Stokes diagnostic: the flux side is identically zero
/// (exact connection), so this reports the loop quadrature noise relative to
/// the same floor.
inline double stokes_residual_gibbs(const ControlPath& path, double beta) {
  const double loop = loop_work_gibbs(path, beta).w_cyc;
  return std::abs(loop) / std::max(std::abs(loop), 1e-15);
}

namespace detail {

inline double smoothstep(double s) { return s * s * (3.0 - 2.0 * s); }
inline double smoothstep_rate(double s) { return 6.0 * s * (1.0 - s); }

struct ProtocolState {
  Controls position;
  double omega_rate = 0.0;
  double g_rate = 0.0;
};

/// Piecewise-linear loops get length-proportional time shares per segment;
/// SmoothstepReparam makes the traversal C^1 at the corners.
class ProtocolEvaluator {
 public:
  ProtocolEvaluator(const ControlPath& path, Schedule schedule, double period)
      : path_(path), schedule_(schedule), period_(period) {
    if (path.kind != PathKind::Ellipse) {
      segments_ = (path.kind == PathKind::Rectangle)
                      ? rectangle_segments(path)
                      : polyline_segments(path);
      total_length_ = 0.0;
      for (const Segment& s : segments_) {
        total_length_ += segment_length(s);
        cumulative_.push_back(total_length_);
      }
    }
  }

  ProtocolState at(double t) const {
    double frac = std::fmod(t / period_, 1.0);
    if (frac < 0.0) frac += 1.0;
    if (path_.kind == PathKind::Ellipse) return ellipse_at(frac);
    if (total_length_ == 0.0) {
      // Zero-size path: the drive is static and no work is done.
      return {segments_.empty() ? path_.center : segments_.front().a, 0.0,
              0.0};
    }
    const double target = frac * total_length_;
    std::size_t k = 0;
    while (k + 1 < segments_.size() && cumulative_[k] <= target) ++k;
    const double seg_len = segment_length(segments_[k]);
    const double seg_start = cumulative_[k] - seg_len;
    double u = (seg_len > 0.0) ? (target - seg_start) / seg_len : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    const double seg_time = period_ * seg_len / total_length_;
    const Segment& s = segments_[k];
    const double dw = s.b.omega - s.a.omega, dg = s.b.g - s.a.g;
    double pos_u = u, rate_u = 1.0 / seg_time;
    if (schedule_ == Schedule::SmoothstepReparam) {
      pos_u = smoothstep(u);
      rate_u = smoothstep_rate(u) / seg_time;
    }
    return {{s.a.omega + pos_u * dw, s.a.g + pos_u * dg}, dw * rate_u,
            dg * rate_u};
  }

 private:
  ProtocolState ellipse_at(double frac) const {
    const double dir = (path_.orientation == Orientation::CCW) ? 1.0 : -1.0;
    double angle_frac = frac, frac_rate = 1.0 / period_;
    if (schedule_ == Schedule::SmoothstepReparam) {
      angle_frac = smoothstep(frac);
      frac_rate = smoothstep_rate(frac) / period_;
    }
    const double theta = dir * 2.0 * std::numbers::pi * angle_frac;
    const double theta_rate = dir * 2.0 * std::numbers::pi * frac_rate;
    const double a = path_.extent_omega, b = path_.extent_g;
    return {{path_.center.omega + a * std::cos(theta),
             path_.center.g + b * std::sin(theta)},
            -a * std::sin(theta) * theta_rate,
            b * std::cos(theta) * theta_rate};
  }

  ControlPath path_;
  Schedule schedule_;
  double period_;
  std::vector<Segment> segments_;
  std::vector<double> cumulative_;
  double total_length_ = 0.0;
};

inline double protocol_max_rate(const ControlPath& path, const BathSpec& b) {
  double cmax = 0.0;
  if (path.kind == PathKind::Polyline) {
    for (const Controls& v : path.vertices)
      cmax = std::max({cmax, std::abs(v.omega), std::abs(v.g)});
  } else {
    cmax = std::max(std::abs(path.center.omega) + path.extent_omega,
                    std::abs(path.center.g) + path.extent_g);
  }
  return std::max({cmax, b.gamma1, b.gamma2});
}

}  // namespace detail

/// Work done by the time-dependent drive over one steady cycle:
///   W = (1/2) integral over one period of (z d(omega)/dt + x d(g)/dt) dt
/// along the true (non-stationary) trajectory. One full burn-in period is
/// integrated first so the reported work belongs to the periodic attractor.
/// Throws StepTooLarge when dt exceeds 0.1 / max rate along the path.
inline double dynamic_work(const DriveProtocol& protocol, const BathSpec& b,
                           const BlochVector& initial, double dt) {
  validate(b);
  if (!(protocol.period > 0.0))
    throw ValidationError("dynamic_work: period > 0 required");
  if (!(dt > 0.0)) throw ValidationError("dynamic_work: dt > 0 required");
  const double bound = 0.1 / detail::protocol_max_rate(protocol.path, b);
  if (dt > bound)
    throw StepTooLarge("dynamic_work: dt " + std::to_string(dt) +
                       " exceeds stability bound " + std::to_string(bound));

  const detail::ProtocolEvaluator proto(protocol.path, protocol.schedule,
                                        protocol.period);
  const auto steps_per_period = static_cast<long long>(
      std::ceil(protocol.period / dt - 1e-12));
  const double h = protocol.period / static_cast<double>(steps_per_period);

  struct State {
    BlochVector r;
    double work;
  };
  const auto rhs = [&](double t, const State& s) -> State {
    const detail::ProtocolState p = proto.at(t);
    const BlochVector v = bloch_rhs(s.r, p.position, b);
    return {v, 0.5 * (s.r.z * p.omega_rate + s.r.x * p.g_rate)};
  };
  const auto add = [](const State& s, const State& k, double f) -> State {
    return {{s.r.x + f * k.r.x, s.r.y + f * k.r.y, s.r.z + f * k.r.z},
            s.work + f * k.work};
  };

  State s{initial, 0.0};
  for (int period = 0; period < 2; ++period) {
    s.work = 0.0;  // measure only the final period
    const double t0 = period * protocol.period;
    for (long long i = 0; i < steps_per_period; ++i) {
      const double t = t0 + static_cast<double>(i) * h;
      const State k1 = rhs(t, s);
      const State k2 = rhs(t + h / 2, add(s, k1, h / 2));
      const State k3 = rhs(t + h / 2, add(s, k2, h / 2));
      const State k4 = rhs(t + h, add(s, k3, h));
      s = {{s.r.x + h / 6 * (k1.r.x + 2 * k2.r.x + 2 * k3.r.x + k4.r.x),
            s.r.y + h / 6 * (k1.r.y + 2 * k2.r.y + 2 * k3.r.y + k4.r.y),
            s.r.z + h / 6 * (k1.r.z + 2 * k2.r.z + 2 * k3.r.z + k4.r.z)},
           s.work + h / 6 * (k1.work + 2 * k2.work + 2 * k3.work + k4.work)};
    }
  }
  return s.work;
}

/// Verify that dynamical work approaches the quasistatic loop work as the
/// period grows. Periods must be ascending; each row reports the work and
/// its distance from the quasistatic value, and the log-log slope of that
/// error is fitted when at least two usable rows exist. The empirical slope
/// is close to -1 for smooth schedules.
///
/// `gibbs_beta` is accepted for interface symmetry but rejected: no
/// dynamical model is defined for the Hamiltonian-aligned dissipator.
inline AdiabaticStudy adiabatic_convergence_study(
    const ControlPath& path, const BathSpec& b,
    const std::vector<double>& periods, double dt = 0.0,
    std::optional<double> gibbs_beta = std::nullopt) {
  validate(b);
  if (gibbs_beta)
    throw NotSupported(
        "adiabatic_convergence_study: no dynamical model for the "
        "Hamiltonian-aligned dissipator");
  if (periods.empty())
    throw ValidationError("adiabatic_convergence_study: empty period list");
  for (std::size_t i = 1; i < periods.size(); ++i)
    if (!(periods[i] > periods[i - 1]))
      throw ValidationError(
          "adiabatic_convergence_study: periods must be ascending");

  ControlPath fine = path;
  fine.samples_per_unit *= 4.0;
  AdiabaticStudy study;
  study.quasistatic_work = loop_work_quasistatic(fine, b).w_cyc;

  const double max_rate = detail::protocol_max_rate(path, b);
  const double step =
      (dt > 0.0) ? dt : std::min(0.25 * 0.1 / max_rate,
                                 0.02 / std::max(1.0, max_rate));
  const BlochVector start =
      ness_closed_form(detail::ProtocolEvaluator(path, Schedule::UniformSpeed,
                                                 1.0)
                           .at(0.0)
                           .position,
                       b);
  for (const double period : periods) {
    const double w =
        dynamic_work({path, period, Schedule::SmoothstepReparam}, b, start,
                     step);
    study.rows.push_back({period, w, std::abs(w - study.quasistatic_work)});
  }

  // Least-squares fit of ln(error) against ln(period).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const AdiabaticRow& row : study.rows) {
    if (row.abs_error <= 1e-14) continue;
    const double lx = std::log(row.period), ly = std::log(row.abs_error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n >= 2) {
    const double denom = n * sxx - sx * sx;
    if (denom > 0.0) study.slope = (n * sxy - sx * sy) / denom;
  }
  return study;
}

}  // namespace blochwork
