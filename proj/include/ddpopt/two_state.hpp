#pragma once

// Two-state RWA Hamiltonian H = (1/2)[[-Delta, Omega], [Omega, Delta]]
// (hbar = 1, energies in rad/time), its adiabatic basis, and the pulse-model
// abstraction shared by the propagator and the DDP engine.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ddpopt/errors.hpp"
#include "ddpopt/special_functions.hpp"

namespace ddpopt {

using Matrix2 = std::array<std::array<cplx, 2>, 2>;

enum class Basis { diabatic, adiabatic };

inline const char* to_string(Basis b) { return b == Basis::diabatic ? "diabatic" : "adiabatic"; }

/// Probability amplitudes. In the adiabatic basis c1 = a_-, c2 = a_+.
struct AmplitudePair {
  cplx c1;
  cplx c2;
  Basis basis = Basis::diabatic;
  double time = 0.0;

  double norm() const { return std::sqrt(std::norm(c1) + std::norm(c2)); }
};

/// Rectangle in the complex time plane.
struct Rect {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  bool contains(cplx t, double margin = 0.0) const {
    return t.real() >= re_min - margin && t.real() <= re_max + margin && t.imag() >= im_min - margin &&
           t.imag() <= im_max + margin;
  }
};

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;
};

/// Omega(t) and Delta(t) as maps of complex time, with analytic derivatives.
///
/// On the real line both maps are real. `time_scale` and `energy_scale` are
/// the characteristic T and splitting used for default grids and
/// tolerances. Models built from non-analytic shapes set
/// `complex_capable = false`; the DDP engine refuses them.
struct PulseModel {
  using Map = std::function<cplx(cplx)>;

  std::string label;
  std::map<std::string, double> params;
  Map omega;
  Map delta;
  Map omega_dot;
  Map delta_dot;
  double time_scale = 1.0;
  double energy_scale = 1.0;
  bool complex_capable = true;
  TimeWindow window{-6.0, 6.0};
  Rect search{-4.0, 4.0, 0.0, 4.0};

  double omega_real(double t) const { return omega(cplx{t, 0.0}).real(); }
  double delta_real(double t) const { return delta(cplx{t, 0.0}).real(); }
  double omega_dot_real(double t) const { return omega_dot(cplx{t, 0.0}).real(); }
  double delta_dot_real(double t) const { return delta_dot(cplx{t, 0.0}).real(); }
};

/// Mixing angle, tan(2 theta) = Omega / Delta.
struct MixingAngle {
  double value = 0.0;
};

/// theta in [0, pi/2] for Omega >= 0, decreasing from pi/2 to 0 as Delta
/// goes from -inf to +inf; theta = pi/4 on resonance.
inline MixingAngle mixing_angle(double omega, double delta) {
  if (omega == 0.0 && delta == 0.0) throw DegenerateInputError("mixing_angle: Omega and Delta both zero");
  if (delta == 0.0) return {omega > 0.0 ? std::numbers::pi / 4.0 : -std::numbers::pi / 4.0};
  return {0.5 * std::atan2(omega, delta)};
}

inline cplx splitting_squared(const PulseModel& m, cplx t) {
  const cplx o = m.omega(t);
  const cplx d = m.delta(t);
  return o * o + d * d;
}

inline cplx splitting_squared_derivative(const PulseModel& m, cplx t) {
  return 2.0 * (m.omega(t) * m.omega_dot(t) + m.delta(t) * m.delta_dot(t));
}

/// sqrt(Omega^2 + Delta^2), principal branch. Along complex paths use
/// BranchTrackedSplitting (quadrature.hpp) instead.
inline cplx eigen_splitting(const PulseModel& m, cplx t) { return std::sqrt(splitting_squared(m, t)); }

inline double eigen_splitting(const PulseModel& m, double t) {
  return std::hypot(m.omega_real(t), m.delta_real(t));
}

/// d theta / dt = (Omega' Delta - Delta' Omega) / (2 (Omega^2 + Delta^2)).
inline double nonadiabatic_coupling(const PulseModel& m, double t) {
  const double o = m.omega_real(t);
  const double d = m.delta_real(t);
  const double e2 = o * o + d * d;
  if (e2 == 0.0) throw DegenerateInputError("nonadiabatic_coupling: vanishing splitting at t = " + std::to_string(t));
  return (m.omega_dot_real(t) * d - m.delta_dot_real(t) * o) / (2.0 * e2);
}

/// Analytic continuation of nonadiabatic_coupling to complex time.
inline cplx complex_nonadiabatic_coupling(const PulseModel& m, cplx t) {
  const cplx o = m.omega(t);
  const cplx d = m.delta(t);
  return (m.omega_dot(t) * d - m.delta_dot(t) * o) / (2.0 * (o * o + d * d));
}

/// Zero of the splitting on the real interval [a, b], located by sampling
/// and golden-section refinement of local minima of E^2.
inline std::optional<double> real_axis_degeneracy(const PulseModel& m, double a, double b, int samples = 4001) {
  const double tol = 1e-12 * m.energy_scale * m.energy_scale;
  const auto e2 = [&](double t) { return std::norm(m.omega_real(t)) + std::norm(m.delta_real(t)); };
  std::vector<double> v(samples);
  const double dx = (b - a) / (samples - 1);
  for (int j = 0; j < samples; ++j) v[j] = e2(a + dx * j);
  for (int j = 0; j < samples; ++j) {
    const bool local_min = (j == 0 || v[j] <= v[j - 1]) && (j == samples - 1 || v[j] <= v[j + 1]);
    if (!local_min) continue;
    if (v[j] <= tol) return a + dx * j;
    // golden-section refinement inside the bracketing cells
    double lo = a + dx * std::max(0, j - 1);
    double hi = a + dx * std::min(samples - 1, j + 1);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = e2(x1);
    double f2 = e2(x2);
    for (int it = 0; it < 100 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = e2(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = e2(x2);
      }
    }
    if (std::min(f1, f2) <= tol) return f1 < f2 ? x1 : x2;
  }
  return std::nullopt;
}


enum class RotationDirection { to_adiabatic, to_diabatic };

/// c = R(theta) a with R = [[cos, sin], [-sin, cos]].
inline AmplitudePair adiabatic_rotate(const AmplitudePair& amps, MixingAngle theta, RotationDirection dir) {
  const double c = std::cos(theta.value);
  const double s = std::sin(theta.value);
  if (dir == RotationDirection::to_adiabatic) {
    if (amps.basis != Basis::diabatic) throw BasisMismatchError("adiabatic_rotate: expected diabatic amplitudes");
    return {c * amps.c1 - s * amps.c2, s * amps.c1 + c * amps.c2, Basis::adiabatic, amps.time};
  }
  if (amps.basis != Basis::adiabatic) throw BasisMismatchError("adiabatic_rotate: expected adiabatic amplitudes");
  return {c * amps.c1 + s * amps.c2, -s * amps.c1 + c * amps.c2, Basis::diabatic, amps.time};
}

inline AmplitudePair to_basis(const AmplitudePair& amps, Basis target, const PulseModel& m) {
  if (amps.basis == target) return amps;
  const MixingAngle theta = mixing_angle(m.omega_real(amps.time), m.delta_real(amps.time));
  return adiabatic_rotate(
      amps, theta, target == Basis::adiabatic ? RotationDirection::to_adiabatic : RotationDirection::to_diabatic);
}

enum class HamiltonianConvention {
  /// diag(E_-, E_+) with E_pm = (Delta pm E)/2, coupling -+ i theta'.
  canonical,
  /// [[E, -2 theta'], [-2 theta', -E]], the form in which the erf model's
  /// adiabatic Hamiltonian is usually displayed (diag pm Omega0, coupling
  /// sqrt(pi)/T exp(-(t/T)^2)).
  displayed,
};

/// Diabatic Hamiltonian (1/2)[[-Delta, Omega], [Omega, Delta]].
inline Matrix2 diabatic_hamiltonian(const PulseModel& m, double t) {
  const double o = m.omega_real(t);
  const double d = m.delta_real(t);
  return {{{cplx{-0.5 * d}, cplx{0.5 * o}}, {cplx{0.5 * o}, cplx{0.5 * d}}}};
}

inline Matrix2 adiabatic_hamiltonian(const PulseModel& m, double t,
                                     HamiltonianConvention conv = HamiltonianConvention::canonical) {
  const double o = m.omega_real(t);
  const double d = m.delta_real(t);
  const double e = std::hypot(o, d);
  if (e == 0.0) throw DegenerateInputError("adiabatic_hamiltonian: degenerate splitting");
  const double thd = nonadiabatic_coupling(m, t);
  if (conv == HamiltonianConvention::displayed) {
    return {{{cplx{e}, cplx{-2.0 * thd}}, {cplx{-2.0 * thd}, cplx{-e}}}};
  }
  const cplx i{0.0, 1.0};
  return {{{cplx{0.5 * (d - e)}, -i * thd}, {i * thd, cplx{0.5 * (d + e)}}}};
}

}  // namespace ddpopt
