#pragma once

// Dykhne-Davis-Pechukas machinery for analytic pulse models: transition
// points (complex zeros of the splitting), the phase integral D(t0), the
// Gamma prefactors and the single/multi-point probability formulas.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "ddpopt/errors.hpp"
#include "ddpopt/quadrature.hpp"
#include "ddpopt/two_state.hpp"

namespace ddpopt {

enum class PointSign { plus, minus, on_axis };

inline const char* to_string(PointSign s) {
  switch (s) {
    case PointSign::plus: return "+";
    case PointSign::minus: return "-";
    default: return "0";
  }
}

struct TransitionPoint {
  cplx t0;
  int index_k = 0;
  PointSign sign = PointSign::plus;
  double residual = 0.0;  ///< |Omega^2 + Delta^2| at t0
};

struct SearchOptions {
  Rect region;            ///< im_min is treated as 0+
  double seed_spacing = 0.0;  ///< 0: min(T, pi/scale)/4
  int max_points = 64;
  int max_newton = 80;
};

struct TransitionSearch {
  std::vector<TransitionPoint> points;
  std::vector<std::string> warnings;
  int seeds = 0;

  /// No zeros in the region: the DDP-optimal outcome, not a failure.
  bool no_transition_points() const { return points.empty(); }
};

inline SearchOptions default_search(const PulseModel& m) { return SearchOptions{m.search}; }

namespace detail {

inline void require_complex(const PulseModel& m, const char* what) {
  if (!m.complex_capable)
    throw CapabilityError(std::string(what) + ": model '" + m.label + "' is not evaluable at complex time");
}

}  // namespace detail

/// Newton iteration on E^2(t) = Omega^2 + Delta^2 from a rectangular seed
/// grid; zeros are deduplicated and sorted by Im t0, then Re t0.
inline TransitionSearch find_transition_points(const PulseModel& m, const SearchOptions& opt) {
  detail::require_complex(m, "find_transition_points");
  const Rect& reg = opt.region;
  if (!(reg.im_max > 0.0) || reg.im_min < 0.0 || !(reg.re_max > reg.re_min))
    throw DomainError("find_transition_points: search region must lie in the upper half-plane");

  const double T = m.time_scale;
  const double scale2 = m.energy_scale * m.energy_scale;
  const double spacing =
      opt.seed_spacing > 0.0 ? opt.seed_spacing : std::min(T, std::numbers::pi / m.energy_scale) / 4.0;
  const int nx = std::max(2, static_cast<int>(std::ceil((reg.re_max - reg.re_min) / spacing)) + 1);
  const double im_lo = std::max(reg.im_min, 1e-3 * spacing);
  const int ny = std::max(2, static_cast<int>(std::ceil((reg.im_max - im_lo) / spacing)) + 1);
  const double margin = 1e-9 * T;
  const double dedup = 1e-7 * T;

  // Coverage bookkeeping on a 4x4 partition of the region.
  constexpr int kBlocks = 4;
  std::array<std::array<int, kBlocks>, kBlocks> converged{};

  TransitionSearch out;
  std::vector<cplx> found;
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      cplx t{reg.re_min + (reg.re_max - reg.re_min) * ix / (nx - 1), im_lo + (reg.im_max - im_lo) * iy / (ny - 1)};
      ++out.seeds;
      bool ok = false;
      for (int it = 0; it < opt.max_newton; ++it) {
        const cplx f = splitting_squared(m, t);
        const cplx df = splitting_squared_derivative(m, t);
        if (!std::isfinite(std::abs(f)) || !std::isfinite(std::abs(df)) || std::abs(df) == 0.0) break;
        cplx step = f / df;
        // damp wild jumps so iterates stay near their seed's basin
        const double lim = 2.0 * (reg.re_max - reg.re_min + reg.im_max);
        if (std::abs(step) > lim) step *= lim / std::abs(step);
        t -= step;
        if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) break;
        if (std::abs(step) <= 1e-14 * std::max(T, std::abs(t))) {
          ok = std::abs(splitting_squared(m, t)) <= 1e-10 * scale2;
          break;
        }
      }
      if (!ok) continue;
      const int bx = std::min(kBlocks - 1, ix * kBlocks / nx);
      const int by = std::min(kBlocks - 1, iy * kBlocks / ny);
      ++converged[bx][by];
      if (!(t.imag() > margin) || !reg.contains(t, margin)) continue;
      const bool dup = std::any_of(found.begin(), found.end(), [&](cplx z) { return std::abs(z - t) < dedup; });
      if (!dup) found.push_back(t);
    }
  }

  // Symmetric models (Omega even, Delta odd) put zeros on Re t = 0 exactly.
  for (auto& z : found)
    if (std::abs(z.real()) < 1e-10 * T) z = cplx{0.0, z.imag()};

  std::sort(found.begin(), found.end(), [&](cplx a, cplx b) {
    if (std::abs(a.imag() - b.imag()) > 1e-8 * T) return a.imag() < b.imag();
    return a.real() < b.real();
  });
  int k = -1;
  double last_im = -1.0;
  for (const cplx z : found) {
    if (static_cast<int>(out.points.size()) >= opt.max_points) break;
    if (std::abs(z.imag() - last_im) > 1e-8 * T) {
      ++k;
      last_im = z.imag();
    }
    const PointSign s = z.real() > 0.0 ? PointSign::plus : (z.real() < 0.0 ? PointSign::minus : PointSign::on_axis);
    out.points.push_back({z, k, s, std::abs(splitting_squared(m, z))});
  }

  if (!out.points.empty()) {
    for (int bx = 0; bx < kBlocks; ++bx)
      for (int by = 0; by < kBlocks; ++by)
        if (converged[bx][by] == 0)
          out.warnings.push_back("no Newton seed converged in sub-block (" + std::to_string(bx) + ", " +
                                 std::to_string(by) + ") of the search region");
  }
  return out;
}

inline TransitionSearch find_transition_points(const PulseModel& m) { return find_transition_points(m, default_search(m)); }

struct DdpIntegral {
  cplx value;
  double error = 0.0;
  std::size_t path_samples = 0;
  cplx splitting_near_end;  ///< branch-tracked E just before the endpoint
  cplx near_end_point;
};

/// D(t_end) = integral of E(t) dt along the straight segment 0 -> t_end, with
/// E continued from the real axis. When t_end is a zero of E^2 the square
/// root endpoint singularity is removed by t = t_end (1 - u^2).
inline DdpIntegral ddp_integral(const PulseModel& m, cplx t_end, double rel_tol = 1e-12) {
  detail::require_complex(m, "ddp_integral");
  if (t_end == cplx{0.0, 0.0}) return {};
  const auto radicand = [&m, t_end](double s) { return splitting_squared(m, t_end * s); };
  const BranchTrackedSqrt E(radicand);

  const auto integrand = [&](double u) {
    const double s = 1.0 - u * u;
    const cplx r = radicand(s);
    return E.evaluate(s, r) * (2.0 * u) * t_end;
  };
  const auto q = integrate_adaptive(integrand, 0.0, 1.0, rel_tol * 1e-1, 1e-300);
  if (!(q.error <= 1e-9 * std::max(std::abs(q.value), 1e-300) || q.error < 1e-14 * m.energy_scale * std::abs(t_end)))
    throw PathRefinementError("ddp_integral: quadrature did not reach 1e-9 relative accuracy");
  const double s_near = 1.0 - 1e-4;
  return {q.value, q.error, E.samples(), E.evaluate(s_near, radicand(s_near)), t_end * s_near};
}

inline DdpIntegral ddp_integral(const PulseModel& m, const TransitionPoint& p) { return ddp_integral(m, p.t0); }

/// Gamma = 4i lim_{t->t0} (t - t0) theta'(t), from the mean of
/// (t - t0) theta'(t) over circles of radius r = 1e-3 Im t0 and r/2,
/// Richardson-combined.
inline cplx gamma_factor(const PulseModel& m, cplx t0) {
  detail::require_complex(m, "gamma_factor");
  const double r = 1e-3 * t0.imag();
  if (!(r > 0.0)) throw DomainError("gamma_factor: transition point must lie in the upper half-plane");
  constexpr int kNodes = 64;
  const auto circle = [&](double radius, double& peak) {
    cplx acc = 0.0;
    peak = 0.0;
    for (int j = 0; j < kNodes; ++j) {
      const cplx d = std::polar(radius, 2.0 * std::numbers::pi * (j + 0.5) / kNodes);
      const cplx g = d * complex_nonadiabatic_coupling(m, t0 + d);
      peak = std::max(peak, std::abs(g));
      acc += g;
    }
    return acc / static_cast<double>(kNodes);
  };
  double peak_r = 0.0;
  double peak_h = 0.0;
  const cplx g_r = circle(r, peak_r);
  const cplx g_h = circle(0.5 * r, peak_h);
  // (t - t0) theta' stays bounded at a simple zero; at a double zero it
  // grows like 1/|t - t0|.
  if (peak_h > 1.5 * peak_r || !std::isfinite(peak_h))
    throw LimitDivergenceError("gamma_factor: (t - t0) theta'(t) diverges; t0 is not a simple zero");
  const cplx limit = (4.0 * g_h - g_r) / 3.0;
  return cplx{0.0, 4.0} * limit;
}

inline cplx gamma_factor(const PulseModel& m, const TransitionPoint& p) { return gamma_factor(m, p.t0); }

/// exp(-2 Im D(t0)).
inline double ddp_probability_single(const PulseModel& m, const TransitionPoint& p) {
  return std::exp(-2.0 * ddp_integral(m, p).value.imag());
}

struct PointContribution {
  TransitionPoint point;
  cplx D;
  cplx gamma;
};

struct MultiPointProbability {
  double raw = 0.0;  ///< |sum Gamma_k exp(i D_k)|^2, unclipped
  bool no_points = false;
  std::vector<PointContribution> terms;

  double reported() const { return std::clamp(raw, 0.0, 1.0); }
};

/// |sum_k Gamma_k exp(i D(t_k))|^2 over the supplied points.
inline MultiPointProbability ddp_probability_multi(const PulseModel& m, const std::vector<TransitionPoint>& points) {
  MultiPointProbability out;
  if (points.empty()) {
    out.no_points = true;
    return out;
  }
  cplx sum = 0.0;
  for (const auto& p : points) {
    const cplx D = ddp_integral(m, p).value;
    const cplx G = gamma_factor(m, p);
    out.terms.push_back({p, D, G});
    sum += G * std::exp(cplx{0.0, 1.0} * D);
  }
  out.raw = std::norm(sum);
  return out;
}

struct DdpOptions {
  SearchOptions search;
  /// Points whose Im D exceeds the lowest level by more than this (relative)
  /// are dropped from the coherent sum. 1e-6 keeps only the lowest Stokes
  /// level.
  double max_level_gap = 1e-6;
};

inline DdpOptions default_ddp_options(const PulseModel& m) { return {default_search(m), 1e-6}; }

struct DdpResult {
  std::vector<PointContribution> points;  ///< points used in the coherent sum
  std::vector<TransitionPoint> all_points;
  double p_single = 0.0;  ///< exp(-2 Im D) of the lowest point
  double p_multi = 0.0;   ///< raw coherent sum
  bool no_points = false;
  std::vector<std::string> warnings;

  double p_multi_reported() const { return std::clamp(p_multi, 0.0, 1.0); }
};

/// Locate points, keep those on the lowest Stokes level and assemble both
/// probability estimates.
inline DdpResult analyze_ddp(const PulseModel& m, const DdpOptions& opt) {
  DdpResult res;
  auto search = find_transition_points(m, opt.search);
  res.all_points = search.points;
  res.warnings = std::move(search.warnings);
  if (search.points.empty()) {
    res.no_points = true;
    return res;
  }
  std::vector<PointContribution> cand;
  for (const auto& p : search.points) {
    try {
      cand.push_back({p, ddp_integral(m, p).value, cplx{}});
    } catch (const PathRefinementError& e) {
      res.warnings.push_back(std::string("skipped point: ") + e.what());
    }
  }
  if (cand.empty()) {
    res.no_points = true;
    return res;
  }
  // The level is set by the points nearest the real axis. A straight path
  // to a higher point can pass around a lower branch point and land on
  // another sheet; such a point may show a spuriously low Im D and must
  // not redefine the level.
  const int k_min = std::min_element(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
                      return a.point.index_k < b.point.index_k;
                    })->point.index_k;
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& c : cand)
    if (c.point.index_k == k_min) lowest = std::min(lowest, c.D.imag());
  const double gap = opt.max_level_gap * std::max(1.0, std::abs(lowest));
  cplx sum = 0.0;
  for (auto& c : cand) {
    if (c.point.index_k != k_min && c.D.imag() < lowest - gap) {
      res.warnings.push_back("point " + std::to_string(c.point.t0.real()) + (c.point.t0.imag() < 0 ? "" : "+") +
                             std::to_string(c.point.t0.imag()) +
                             "i: straight-path Im D lies below the lowest level; excluded");
      continue;
    }
    if (c.D.imag() - lowest > gap) continue;
    c.gamma = gamma_factor(m, c.point);
    sum += c.gamma * std::exp(cplx{0.0, 1.0} * c.D);
    res.points.push_back(c);
  }
  res.p_single = std::exp(-2.0 * lowest);
  res.p_multi = std::norm(sum);
  return res;
}

inline DdpResult analyze_ddp(const PulseModel& m) { return analyze_ddp(m, default_ddp_options(m)); }

}  // namespace ddpopt
