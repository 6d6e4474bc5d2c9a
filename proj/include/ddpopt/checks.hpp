#pragma once

// End-to-end comparisons between the propagator, the generic DDP engine and
// the Gaussian closed forms. Shared by the `compare` command and the
// acceptance binary; each check reports its worst measured deviation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "ddpopt/ddp_engine.hpp"
#include "ddpopt/experiments.hpp"
#include "ddpopt/gaussian_analytic.hpp"
#include "ddpopt/propagator.hpp"
#include "ddpopt/pulse_families.hpp"

namespace ddpopt {

struct CheckResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
};

namespace check_detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string sci(double v) { return fmt("%.3e", v); }

/// Interior local minima of y(x), refined by a parabola through the three
/// samples around each.
inline std::vector<double> local_minima(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (!(y[i] < y[i - 1] && y[i] <= y[i + 1])) continue;
    const double den = y[i - 1] - 2.0 * y[i] + y[i + 1];
    const double off = den > 0.0 ? 0.5 * (y[i - 1] - y[i + 1]) / den : 0.0;
    out.push_back(x[i] + off * (x[i + 1] - x[i - 1]) / 2.0);
  }
  return out;
}

/// Sign changes of f on the grid, bisected to full precision.
inline std::vector<double> roots_on_grid(const std::function<double(double)>& f, const std::vector<double>& x) {
  std::vector<double> out;
  double fa = f(x.front());
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fb = f(x[i]);
    if (fa == 0.0) out.push_back(x[i - 1]);
    else if (fa * fb < 0.0) {
      double a = x[i - 1];
      double b = x[i];
      double ga = fa;
      for (int it = 0; it < 100 && b - a > 1e-13 * std::abs(b); ++it) {
        const double m = 0.5 * (a + b);
        const double gm = f(m);
        if ((gm < 0.0) == (ga < 0.0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      out.push_back(0.5 * (a + b));
    }
    fa = fb;
  }
  return out;
}

/// Largest relative distance from any point of `from` to its nearest
/// neighbour in `to`; infinity when `to` is empty.
inline double worst_match(const std::vector<double>& from, const std::vector<double>& to) {
  double worst = 0.0;
  for (const double a : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const double b : to) best = std::min(best, std::abs(a - b) / std::abs(a));
    worst = std::max(worst, best);
  }
  return worst;
}

inline std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt("%.4f", v[i]);
  return s + "]";
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

inline double ode_p(const PulseModel& m, double rel_tol = 1e-10) {
  return transition_probability(m, default_config(m, Basis::diabatic, rel_tol)).p_adiabatic;
}

}  // namespace check_detail

/// 1. DDP single-point formula vs. ODE for Landau-Zener.
inline CheckResult check_landau_zener() {
  CheckResult r{1, "Landau-Zener exactness", false, {}};
  double worst = 0.0;
  for (const double x : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    const double v = 1.0 / x;  // Omega0 = 1, Omega0^2 / v = x
    PulseModel m = make_landau_zener(1.0, v);
    const double half = 50.0 / std::sqrt(v);
    m.window = {-half, half};
    const auto pts = find_transition_points(m);
    if (pts.points.empty()) {
      r.detail = "no transition point found at Omega0^2/v = " + check_detail::fmt("%g", x);
      return r;
    }
    const double p_ddp = ddp_probability_single(m, pts.points.front());
    worst = std::max(worst, std::abs(p_ddp - check_detail::ode_p(m)));
  }
  r.passed = worst <= 1e-2;
  r.detail = "max |P_ddp - P_ode| = " + check_detail::sci(worst) + " (tol 1e-2)";
  return r;
}

/// 2. Numeric transition points vs. closed forms for the Gaussian model.
inline CheckResult check_gaussian_points() {
  CheckResult r{2, "Gaussian transition points", false, {}};
  double worst = 0.0;
  for (const double a : {0.25, 0.5, 1.0, 2.0}) {
    const PulseModel m = make_gaussian(a, 1.0, 1.0);
    const auto found = find_transition_points(m).points;
    const GaussianParams g{a, 1.0, 1.0};
    for (int k = 0; k <= 2; ++k) {
      const auto [tp, tm] = transition_points_closed(g, k);
      for (const cplx z : {tp, tm}) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : found)
          best = std::min(best, std::max(std::abs(p.t0.real() - z.real()), std::abs(p.t0.imag() - z.imag())));
        worst = std::max(worst, best);
      }
    }
  }
  r.passed = worst <= 1e-8;
  r.detail = "max component deviation = " + check_detail::sci(worst) + " (tol 1e-8)";
  return r;
}

/// 3. D(tau_0^-) = -conj(D(tau_0^+)).
inline CheckResult check_d_symmetry() {
  CheckResult r{3, "DDP integral mirror symmetry", false, {}};
  double worst = 0.0;
  for (const double a : {0.25, 1.0, 2.0}) {
    const PulseModel m = make_gaussian(a, 1.0, 1.0);
    const auto [tp, tm] = transition_points_closed({a, 1.0, 1.0}, 0);
    const cplx dp = ddp_integral(m, tp).value;
    const cplx dm = ddp_integral(m, tm).value;
    worst = std::max(worst, std::abs(dm + std::conj(dp)) / std::abs(dp));
  }
  r.passed = worst <= 1e-8;
  r.detail = "max |D- + conj(D+)| / |D+| = " + check_detail::sci(worst) + " (tol 1e-8)";
  return r;
}

/// 4. Small-alpha series (20 terms) vs. quadrature.
inline CheckResult check_series() {
  CheckResult r{4, "Small-alpha series vs quadrature", false, {}};
  double worst = 0.0;
  std::string per;
  for (const double a : {0.05, 0.1, 0.3}) {
    const GaussianParams g{a, 1.0, 1.0};
    const PulseModel m = make_gaussian(a, 1.0, 1.0);
    const cplx q = ddp_integral(m, transition_points_closed(g, 0).first).value;
    const double e = std::abs(ddp_series_small_alpha(g, 20) - q) / std::abs(q);
    per += (per.empty() ? "" : ", ") + check_detail::fmt("%g", a) + ": " + check_detail::sci(e);
    worst = std::max(worst, e);
  }
  r.passed = worst <= 1e-6;
  r.detail = "max relative error = " + check_detail::sci(worst) + " (tol 1e-6; " + per + ")";
  return r;
}

/// 5. Uniform Im D vs. quadrature: exact anchor at alpha = 1 and a band.
inline CheckResult check_im_d_uniform() {
  CheckResult r{5, "Uniform Im D approximation", false, {}};
  const auto rel = [](double a) {
    const GaussianParams g{a, 1.0, 1.0};
    const PulseModel m = make_gaussian(a, 1.0, 1.0);
    const double q = ddp_integral(m, transition_points_closed(g, 0).first).value.imag();
    return std::abs(im_d_uniform(g) - q) / q;
  };
  const double anchor = rel(1.0);
  double band = 0.0;
  for (int i = 0; i <= 60; ++i) band = std::max(band, rel(0.1 * std::pow(50.0, i / 60.0)));
  r.passed = anchor <= 1e-5 && band <= 0.03;
  r.detail = "alpha=1: " + check_detail::sci(anchor) + " (tol 1e-5); max over [0.1, 5]: " + check_detail::sci(band) +
             " (tol 3e-2)";
  return r;
}

struct Fig1Panel {
  double deltaT = 0.0;
  std::vector<double> x;
  std::vector<double> p_ode;
  std::vector<double> p_sech;
  std::vector<double> ode_minima;
  std::vector<double> sech_nodes;
};

/// Gaussian model, Omega0 T on [0, 10] (200 points), T = 1: ODE
/// probabilities, the sech formula with quadrature D, and their minima.
inline Fig1Panel fig1_panel(double deltaT, int n = 200) {
  Fig1Panel p;
  p.deltaT = deltaT;
  p.x = check_detail::linspace(0.0, 10.0, n);
  const auto action = [deltaT](double w) {
    return gaussian_action(GaussianParams{w, deltaT, 1.0}, "quadrature");
  };
  for (const double w : p.x) {
    if (w == 0.0) {
      p.p_ode.push_back(0.0);
      p.p_sech.push_back(0.0);
      continue;
    }
    p.p_ode.push_back(check_detail::ode_p(make_gaussian(w, deltaT, 1.0)));
    const cplx D = action(w);
    p.p_sech.push_back(probability_all_points(D.real(), D.imag()));
  }
  p.ode_minima = check_detail::local_minima(p.x, p.p_ode);
  std::vector<double> inner(p.x.begin() + 1, p.x.end());
  p.sech_nodes = check_detail::roots_on_grid([&](double w) { return std::sin(action(w).real()); }, inner);
  return p;
}

/// 6. Node positions and amplitude of the sech formula vs. ODE.
inline CheckResult check_fig1() {
  CheckResult r{6, "Gaussian Rabi oscillations (sech formula)", false, {}};
  bool ok = true;
  std::string d;
  for (const double dT : {0.3, 1.0, 3.0, 10.0}) {
    const Fig1Panel p = fig1_panel(dT);
    double amp = 0.0;
    for (std::size_t i = 0; i < p.x.size(); ++i) amp = std::max(amp, std::abs(p.p_sech[i] - p.p_ode[i]));
    d += (d.empty() ? "" : "; ") + check_detail::fmt("dT=%g: ", dT);
    if (dT == 0.3) {
      const long diff = std::labs(static_cast<long>(p.ode_minima.size()) - static_cast<long>(p.sech_nodes.size()));
      ok = ok && diff <= 1;
      d += "minima ode " + std::to_string(p.ode_minima.size()) + " vs sech " + std::to_string(p.sech_nodes.size());
      continue;
    }
    const double pos = std::max(check_detail::worst_match(p.ode_minima, p.sech_nodes),
                                check_detail::worst_match(p.sech_nodes, p.ode_minima));
    const bool pos_ok = pos <= 0.05 && !p.ode_minima.empty();
    const bool amp_ok = dT < 3.0 || amp <= 0.05;
    ok = ok && pos_ok && amp_ok;
    d += "node offset " + check_detail::fmt("%.2f%%", 100.0 * pos) + (pos_ok ? "" : " FAIL") + " ode " +
         check_detail::list(p.ode_minima) + " sech " + check_detail::list(p.sech_nodes) + ", max|dP| " +
         check_detail::fmt("%.4f", amp) + (amp_ok ? "" : " FAIL");
  }
  r.passed = ok;
  r.detail = d + " (tol 5% position, 0.05 amplitude for dT >= 3)";
  return r;
}

/// 7. erf model: no transition points, constant splitting, tiny P.
inline CheckResult check_optimized() {
  CheckResult r{7, "Optimized erf pulse", false, {}};
  const PulseModel m = make_erf(50.0, 1.0);
  const double p = check_detail::ode_p(m);
  const bool none = find_transition_points(m).no_transition_points();
  double dev = 0.0;
  for (const double t : check_detail::linspace(m.window.start, m.window.end, 2001))
    dev = std::max(dev, std::abs(eigen_splitting(m, t) - 50.0));
  r.passed = p <= 1e-6 && none && dev <= 1e-12 * 50.0;
  r.detail = "P_ode(Omega0 T=50) = " + check_detail::sci(p) + " (tol 1e-6); no points: " + (none ? "yes" : "no") +
             "; max |E - Omega0| / Omega0 = " + check_detail::sci(dev / 50.0) + " (tol 1e-12)";
  return r;
}

/// 8. erf model: ODE minima vs. nodes of the Gaussian-analytic stack in
/// its adiabatic basis.
inline CheckResult check_superadiabatic() {
  CheckResult r{8, "Superadiabatic DDP node positions", false, {}};
  const auto x = check_detail::linspace(2.0, 10.0, 200);
  std::vector<double> p;
  for (const double w : x) p.push_back(check_detail::ode_p(make_erf(w, 1.0)));
  const auto ode_min = check_detail::local_minima(x, p);
  const auto nodes = check_detail::roots_on_grid(
      [](double w) { return std::sin(re_d_uniform(GaussianParams::superadiabatic(w, 1.0))); }, x);
  const double pos = std::max(check_detail::worst_match(ode_min, nodes), check_detail::worst_match(nodes, ode_min));
  r.passed = !ode_min.empty() && pos <= 0.10;
  r.detail = "ode minima " + check_detail::list(ode_min) + ", predicted nodes " + check_detail::list(nodes) +
             ", worst offset " + check_detail::fmt("%.2f%%", 100.0 * pos) + " (tol 10%)";
  return r;
}

/// 9. Optimized vs. deviated erf sweeps.
inline CheckResult check_fig2() {
  CheckResult r{9, "Optimized vs deviated erf curves", false, {}};
  const auto x = check_detail::linspace(0.5, 10.0, 40);
  double diff = 0.0;
  bool all_none = true;
  bool all_some = true;
  for (const double w : x) {
    const PulseModel a = make_erf(w, 1.0);
    const PulseModel b = make_erf_deviated(w, 1.0, 1.0);
    diff = std::max(diff, std::abs(std::log1p(-check_detail::ode_p(a)) - std::log1p(-check_detail::ode_p(b))));
    all_none = all_none && find_transition_points(a).no_transition_points();
    all_some = all_some && !find_transition_points(b).no_transition_points();
  }
  r.passed = diff >= 1e-3 && all_none && all_some;
  r.detail = "max |ln(1-P) difference| = " + check_detail::sci(diff) + " (need >= 1e-3); optimized point-free: " +
             (all_none ? "yes" : "no") + "; deviated has points: " + (all_some ? "yes" : "no");
  return r;
}

inline std::vector<PulseModel> builtin_models() {
  return {make_landau_zener(1.0, 1.0),
          make_landau_zener(1.0, 0.2),
          make_erf(5.0, 1.0),
          make_erf_deviated(4.0, 1.0, 1.0),
          make_gaussian(3.0, 1.0, 1.0),
          make_superadiabatic_erf(5.0, 1.0),
          make_parametrized(shapes::gaussian_pulse(1.0), 2.0, 1.0),
          make_parametrized(shapes::sech_pulse(1.0), 2.0, 1.0)};
}

/// 10. Norm drift, basis equivalence, coupling vs. finite-difference theta.
inline CheckResult check_integrity() {
  CheckResult r{10, "Propagator integrity", false, {}};
  double drift = 0.0;
  double basis = 0.0;
  double coupling = 0.0;
  for (const auto& m : builtin_models()) {
    const auto rd = transition_probability(m, default_config(m, Basis::diabatic));
    const auto ra = transition_probability(m, default_config(m, Basis::adiabatic));
    drift = std::max({drift, rd.norm_drift, ra.norm_drift});
    basis = std::max({basis, std::abs(rd.final.c1 - ra.final.c1), std::abs(rd.final.c2 - ra.final.c2)});

    const double T = m.time_scale;
    const double h = 1e-6 * T;
    const auto grid = check_detail::linspace(-4.0 * T, 4.0 * T, 200);
    double scale = 0.0;
    double err = 0.0;
    for (const double t : grid) {
      const double exact = nonadiabatic_coupling(m, t);
      const double fd = (mixing_angle(m.omega_real(t + h), m.delta_real(t + h)).value -
                         mixing_angle(m.omega_real(t - h), m.delta_real(t - h)).value) /
                        (2.0 * h);
      scale = std::max(scale, std::abs(exact));
      err = std::max(err, std::abs(fd - exact));
    }
    coupling = std::max(coupling, err / scale);
  }
  r.passed = drift <= 1e-9 && basis <= 1e-8 && coupling <= 1e-5;
  r.detail = "max norm drift " + check_detail::sci(drift) + " (tol 1e-9); basis mismatch " + check_detail::sci(basis) +
             " (tol 1e-8); coupling vs FD " + check_detail::sci(coupling) + " (tol 1e-5)";
  return r;
}

/// 11. Gamma(tau_k^pm) = pm(-1)^k.
inline CheckResult check_gamma() {
  CheckResult r{11, "Gamma quantization", false, {}};
  double worst = 0.0;
  for (const double a : {0.25, 0.5, 1.0, 2.0}) {
    const PulseModel m = make_gaussian(a, 1.0, 1.0);
    for (int k = 0; k <= 1; ++k) {
      const auto [tp, tm] = transition_points_closed({a, 1.0, 1.0}, k);
      const double s = k % 2 == 0 ? 1.0 : -1.0;
      worst = std::max(worst, std::abs(gamma_factor(m, tp) - s));
      worst = std::max(worst, std::abs(gamma_factor(m, tm) + s));
    }
  }
  r.passed = worst <= 1e-4;
  r.detail = "max |Gamma - (+-(-1)^k)| = " + check_detail::sci(worst) + " (tol 1e-4)";
  return r;
}

inline CheckResult run_check(int id) {
  static const std::function<CheckResult()> table[] = {
      check_landau_zener, check_gaussian_points, check_d_symmetry, check_series,       check_im_d_uniform,
      check_fig1,         check_optimized,       check_superadiabatic, check_fig2,     check_integrity,
      check_gamma};
  if (id < 1 || id > 11) throw ConfigError("no check numbered " + std::to_string(id));
  try {
    return table[id - 1]();
  } catch (const std::exception& e) {
    CheckResult r{id, "check " + std::to_string(id), false, {}};
    r.detail = std::string("raised: ") + e.what();
    return r;
  }
}

inline constexpr int kCheckCount = 11;

}  // namespace ddpopt
