#pragma once

// Level-line (Stokes line) tracing: the curve Im D(t) = Im D(t0) through a
// transition point, followed outward until it reaches Re t -> +-inf, hits
// another transition point on the same level, or stalls.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ddpopt/ddp_engine.hpp"
#include "ddpopt/quadrature.hpp"
#include "ddpopt/two_state.hpp"

namespace ddpopt {

enum class RayEnd { plus_infinity, minus_infinity, through_point, escaped, stalled, below_axis };

inline const char* to_string(RayEnd e) {
  switch (e) {
    case RayEnd::plus_infinity: return "+inf";
    case RayEnd::minus_infinity: return "-inf";
    case RayEnd::through_point: return "transition point";
    case RayEnd::escaped: return "escaped";
    case RayEnd::stalled: return "stalled";
    default: return "crossed real axis";
  }
}

struct StokesRay {
  cplx origin;
  std::vector<cplx> path;
  RayEnd end = RayEnd::stalled;
  cplx end_point;
};

struct StokesOptions {
  double infinity_re = 6.0;   ///< |Re t| counted as infinity, in time_scale units
  double max_step = 0.05;     ///< in time_scale units
  double start_radius = 1e-3; ///< first step off a zero, in time_scale units
  int max_steps = 6000;
  int max_depth = 3;          ///< zeros passed through on one line
};

struct StokesResult {
  bool ok = false;
  bool reached_plus = false;
  bool reached_minus = false;
  std::vector<StokesRay> rays;
  std::vector<cplx> points_on_line;  ///< t0 and every zero the line passes through
  std::optional<cplx> failure_location;
  std::string message;
};

namespace detail {

struct Tracer {
  const PulseModel& m;
  const StokesOptions& opt;
  std::vector<cplx> zeros;
  double T;

  cplx pick(cplx e2, cplx ref) const {
    const cplx r = std::sqrt(e2);
    return (r.real() * ref.real() + r.imag() * ref.imag()) >= 0.0 ? r : -r;
  }

  // Integral of E over [a, b] with the branch following `ref`.
  cplx segment(cplx a, cplx b, cplx& ref) const {
    const auto f = [&](double s) {
      const cplx e = pick(splitting_squared(m, a + (b - a) * s), ref);
      return e;
    };
    const cplx v = gauss_legendre8(f, 0.0, 1.0) * (b - a);
    ref = pick(splitting_squared(m, b), ref);
    return v;
  }

  // Integral of E from a zero z to z + delta; t = z + u^2 delta removes the
  // square-root endpoint behaviour. Branch fixed by `ref` at the far end.
  cplx from_zero(cplx z, cplx delta, cplx ref) const {
    const auto f = [&](double u) { return pick(splitting_squared(m, z + u * u * delta), ref) * (2.0 * u) * delta; };
    return gauss_legendre8(f, 0.0, 1.0);
  }

  double nearest_zero(cplx t, cplx exclude, cplx* which) const {
    double best = std::numeric_limits<double>::infinity();
    for (const cplx z : zeros) {
      if (std::abs(z - exclude) < 1e-9 * T) continue;
      const double d = std::abs(z - t);
      if (d < best) {
        best = d;
        if (which) *which = z;
      }
    }
    return best;
  }

  // Directions of the three level-line rays leaving a simple zero z.
  std::vector<cplx> ray_directions(cplx z) const {
    const cplx de2 = splitting_squared_derivative(m, z);
    const double arg_a = 0.5 * std::arg(de2);
    std::vector<cplx> out;
    for (int k = 0; k < 3; ++k) out.push_back(std::polar(1.0, (2.0 / 3.0) * (k * std::numbers::pi - arg_a)));
    return out;
  }

  StokesRay trace(cplx z, cplx dir) const {
    StokesRay ray;
    ray.origin = z;
    const double rho = opt.start_radius * T;
    const double hmax = opt.max_step * T;
    const double tol0 = 1e-10 * std::max(1.0, m.energy_scale * T);
    cplx t = z + rho * dir;
    cplx e = std::sqrt(splitting_squared(m, t));
    // Level offset relative to the zero; zero on the exact line.
    cplx dd = from_zero(z, t - z, e);
    cplx d_prev = dir;
    double h = std::min(hmax, 4.0 * rho);
    ray.path = {z, t};

    for (int step = 0; step < opt.max_steps; ++step) {
      if (t.real() >= opt.infinity_re * T) {
        ray.end = RayEnd::plus_infinity;
        ray.end_point = t;
        return ray;
      }
      if (t.real() <= -opt.infinity_re * T) {
        ray.end = RayEnd::minus_infinity;
        ray.end_point = t;
        return ray;
      }
      // far up the plane the line never returns to the real axis region
      if (t.imag() > opt.infinity_re * T || std::abs(e) > 1e8 * std::max(1.0, m.energy_scale)) {
        ray.end = RayEnd::escaped;
        ray.end_point = t;
        return ray;
      }
      if (t.imag() < 0.0) {
        ray.end = RayEnd::below_axis;
        ray.end_point = t;
        return ray;
      }
      cplx near{};
      const double dist = nearest_zero(t, z, &near);
      if (dist < 4.0 * rho) {
        ray.end = RayEnd::through_point;
        ray.end_point = near;
        ray.path.push_back(near);
        return ray;
      }
      if (std::abs(e) == 0.0 || !std::isfinite(std::abs(e))) {
        ray.end = RayEnd::escaped;
        ray.end_point = t;
        return ray;
      }
      h = std::min({h, hmax, 0.3 * dist});
      // |D| grows along the line; roundoff in the accumulated sum scales with it
      const double tol = std::max(tol0, 1e-12 * std::abs(dd));

      cplx d = std::conj(e) / std::abs(e);
      if ((d * std::conj(d_prev)).real() < 0.0) d = -d;

      bool accepted = false;
      for (int tries = 0; tries < 30 && !accepted; ++tries) {
        cplx ref = e;
        cplx tn = t + h * d;
        cplx dn = dd + segment(t, tn, ref);
        for (int it = 0; it < 6 && std::abs(dn.imag()) > tol; ++it) {
          if (std::abs(ref) == 0.0 || !std::isfinite(std::abs(ref))) break;
          cplx corr = -dn.imag() * cplx{0.0, 1.0} * std::conj(ref) / std::norm(ref);
          if (std::abs(corr) > 0.5 * h) corr *= 0.5 * h / std::abs(corr);
          const cplx tc = tn + corr;
          dn += segment(tn, tc, ref);
          tn = tc;
        }
        const cplx turn = (tn - t) / (h * d);
        if (std::abs(dn.imag()) <= tol && std::isfinite(std::abs(dn)) && std::abs(std::arg(turn)) < 0.3) {
          d_prev = (tn - t) / std::abs(tn - t);
          t = tn;
          e = ref;
          dd = dn;
          accepted = true;
          h *= 1.25;
        } else {
          h *= 0.5;
          if (h < 1e-10 * T) break;
        }
      }
      if (!accepted) {
        ray.end = RayEnd::stalled;
        ray.end_point = t;
        return ray;
      }
      ray.path.push_back(t);
    }
    ray.end = RayEnd::escaped;
    ray.end_point = t;
    return ray;
  }
};

}  // namespace detail

/// Scan the real line (the model window, at least +-6 time scales) for a
/// zero of the splitting. Returns the location of the first zero found.
inline std::optional<double> real_axis_degeneracy(const PulseModel& m, int samples = 4001) {
  return real_axis_degeneracy(m, std::min(m.window.start, -6.0 * m.time_scale),
                              std::max(m.window.end, 6.0 * m.time_scale), samples);
}

/// Trace the level line Im D = Im D(t0) outward from t0 and report whether
/// it extends from Re t = -inf to +inf. Other transition points reached on
/// the way are passed through (up to opt.max_depth of them).
inline StokesResult stokes_check(const PulseModel& m, cplx t0, const StokesOptions& opt = {},
                                 std::vector<cplx> known_zeros = {}) {
  detail::require_complex(m, "stokes_check");
  StokesResult res;
  if (const auto bad = real_axis_degeneracy(m)) {
    res.failure_location = cplx{*bad, 0.0};
    res.message = "splitting vanishes on the real axis at t = " + std::to_string(*bad);
    return res;
  }
  if (!(t0.imag() > 0.0)) {
    res.failure_location = t0;
    res.message = "transition point is not in the upper half-plane";
    return res;
  }
  if (known_zeros.empty()) {
    for (const auto& p : find_transition_points(m).points) known_zeros.push_back(p.t0);
  }
  if (std::none_of(known_zeros.begin(), known_zeros.end(),
                   [&](cplx z) { return std::abs(z - t0) < 1e-7 * m.time_scale; }))
    known_zeros.push_back(t0);

  detail::Tracer tr{m, opt, known_zeros, m.time_scale};
  struct Pending {
    cplx zero;
    cplx incoming;  // direction back toward where we came from; 0 for none
    int depth;
  };
  std::vector<Pending> todo{{t0, cplx{}, 0}};
  res.points_on_line.push_back(t0);

  while (!todo.empty()) {
    const Pending cur = todo.back();
    todo.pop_back();
    auto dirs = tr.ray_directions(cur.zero);
    if (std::abs(cur.incoming) > 0.0) {
      // drop the ray that retraces the arriving path
      auto back = std::max_element(dirs.begin(), dirs.end(), [&](cplx a, cplx b) {
        return (a * std::conj(cur.incoming)).real() < (b * std::conj(cur.incoming)).real();
      });
      dirs.erase(back);
    }
    for (const cplx d : dirs) {
      StokesRay ray = tr.trace(cur.zero, d);
      if (ray.end == RayEnd::plus_infinity) res.reached_plus = true;
      if (ray.end == RayEnd::minus_infinity) res.reached_minus = true;
      if (ray.end == RayEnd::through_point && cur.depth < opt.max_depth) {
        const cplx z = ray.end_point;
        const bool seen = std::any_of(res.points_on_line.begin(), res.points_on_line.end(),
                                      [&](cplx p) { return std::abs(p - z) < 1e-7 * m.time_scale; });
        if (!seen) {
          res.points_on_line.push_back(z);
          const cplx from = ray.path.size() >= 2 ? ray.path[ray.path.size() - 2] : cur.zero;
          todo.push_back({z, (from - z) / std::abs(from - z), cur.depth + 1});
        }
      }
      if ((ray.end == RayEnd::stalled || ray.end == RayEnd::below_axis) && !res.failure_location)
        res.failure_location = ray.end_point;
      res.rays.push_back(std::move(ray));
    }
  }
  res.ok = res.reached_plus && res.reached_minus;
  if (res.ok) {
    res.message = "level line extends from -inf to +inf";
  } else {
    res.message = std::string("level line does not reach ") +
                  (!res.reached_plus && !res.reached_minus ? "either infinity"
                                                           : (res.reached_plus ? "-inf" : "+inf"));
  }
  return res;
}

inline StokesResult stokes_check(const PulseModel& m, const TransitionPoint& p, const StokesOptions& opt = {}) {
  return stokes_check(m, p.t0, opt);
}

}  // namespace ddpopt
