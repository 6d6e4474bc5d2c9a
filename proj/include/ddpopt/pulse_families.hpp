#pragma once

// Built-in pulse models: the Lambda-parametrized family, the constant-
// splitting f(t) family (erf model and its deviated variant), and the
// Landau-Zener and Gaussian reference models.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <string>

#include "ddpopt/errors.hpp"
#include "ddpopt/special_functions.hpp"
#include "ddpopt/two_state.hpp"

namespace ddpopt {

enum class ShapeKind { pulse, monotone };

/// Dimensionless shape of time. For kind `pulse`, `complement` (optional)
/// is the analytic continuation of sign(t) sqrt(1 - value^2); shapes
/// without it are real-line only in the parametrized family.
struct ShapeFunction {
  using Map = std::function<cplx(cplx)>;
  std::string name;
  ShapeKind kind = ShapeKind::pulse;
  double time_scale = 1.0;
  Map value;
  Map derivative;
  std::optional<Map> complement;
  std::optional<Map> complement_derivative;
};

namespace shapes {

inline ShapeFunction gaussian_pulse(double T) {
  ShapeFunction s;
  s.name = "gaussian";
  s.kind = ShapeKind::pulse;
  s.time_scale = T;
  s.value = [T](cplx t) { return std::exp(-(t / T) * (t / T)); };
  s.derivative = [T](cplx t) { return -2.0 * t / (T * T) * std::exp(-(t / T) * (t / T)); };
  // sign(t) sqrt(1 - exp(-2 tau^2)) = tau sqrt(h(tau)), h = -expm1(-2 tau^2) / tau^2
  const auto h_and_dh = [](cplx tau) -> std::pair<cplx, cplx> {
    if (std::abs(tau) < 0.5) {
      // h = sum_{n>=1} (-1)^{n+1} 2^n tau^{2n-2} / n!
      cplx h = 0.0;
      cplx dh = 0.0;
      const cplx tau2 = tau * tau;
      double coef = 1.0;  // 2^n / n!
      cplx pw = 1.0;      // tau^{2n-2}
      for (int n = 1; n < 40; ++n) {
        coef *= 2.0 / n;
        const double sgn = (n % 2 == 1) ? 1.0 : -1.0;
        h += sgn * coef * pw;
        if (n >= 2) dh += sgn * coef * static_cast<double>(2 * n - 2) * pw / tau;
        pw *= tau2;
        if (std::abs(coef * pw) < 1e-18) break;
      }
      if (std::abs(tau) == 0.0) dh = 0.0;
      return {h, dh};
    }
    const cplx tau2 = tau * tau;
    const cplx em = complex_expm1(-2.0 * tau2);
    const cplx h = -em / tau2;
    const cplx dh = 4.0 * std::exp(-2.0 * tau2) / tau + 2.0 * em / (tau2 * tau);
    return {h, dh};
  };
  s.complement = [T, h_and_dh](cplx t) {
    const cplx tau = t / T;
    return tau * std::sqrt(h_and_dh(tau).first);
  };
  s.complement_derivative = [T, h_and_dh](cplx t) {
    const cplx tau = t / T;
    const auto [h, dh] = h_and_dh(tau);
    const cplx sq = std::sqrt(h);
    return (sq + tau * dh / (2.0 * sq)) / T;
  };
  return s;
}

inline ShapeFunction sech_pulse(double T) {
  ShapeFunction s;
  s.name = "sech";
  s.kind = ShapeKind::pulse;
  s.time_scale = T;
  s.value = [T](cplx t) { return 1.0 / std::cosh(t / T); };
  s.derivative = [T](cplx t) { return -std::tanh(t / T) / std::cosh(t / T) / T; };
  s.complement = [T](cplx t) { return std::tanh(t / T); };
  s.complement_derivative = [T](cplx t) {
    const cplx c = std::cosh(t / T);
    return 1.0 / (c * c * T);
  };
  return s;
}

inline ShapeFunction erf_ramp(double T) {
  ShapeFunction s;
  s.name = "erf";
  s.kind = ShapeKind::monotone;
  s.time_scale = T;
  s.value = [T](cplx t) { return complex_erf(t / T); };
  s.derivative = [T](cplx t) { return 2.0 / (std::sqrt(std::numbers::pi) * T) * std::exp(-(t / T) * (t / T)); };
  return s;
}

inline ShapeFunction tanh_ramp(double T) {
  ShapeFunction s;
  s.name = "tanh";
  s.kind = ShapeKind::monotone;
  s.time_scale = T;
  s.value = [T](cplx t) { return std::tanh(t / T); };
  s.derivative = [T](cplx t) {
    const cplx c = std::cosh(t / T);
    return 1.0 / (c * c * T);
  };
  return s;
}

}  // namespace shapes

namespace detail {

constexpr int kValidationSamples = 10000;
constexpr double kValidationSpan = 8.0;  // in units of the shape's time scale

// Derivative vs. central differences on the real line and across it
// (Cauchy-Riemann); rejects kinks and shapes that ignore Im t.
inline void check_analytic_derivative(const ShapeFunction& f) {
  const double T = f.time_scale;
  const double h = 1e-5 * T;
  double scale = 0.0;
  for (int j = 0; j <= 400; ++j) {
    const double t = -kValidationSpan * T + 2.0 * kValidationSpan * T * j / 400.0;
    scale = std::max(scale, std::abs(f.derivative(cplx{t, 0.0})));
  }
  if (scale == 0.0) throw ValidationError("shape '" + f.name + "': derivative vanishes identically");
  for (int j = 0; j <= 400; ++j) {
    // offset keeps samples off symmetric points such as t = 0
    const double t = -kValidationSpan * T + 2.0 * kValidationSpan * T * (j + 0.37) / 401.0;
    const cplx d = f.derivative(cplx{t, 0.0});
    const cplx fd_re = (f.value(cplx{t + h, 0.0}) - f.value(cplx{t - h, 0.0})) / (2.0 * h);
    const cplx fd_im = (f.value(cplx{t, h}) - f.value(cplx{t, -h})) / cplx{0.0, 2.0 * h};
    if (std::abs(fd_re - d) > 1e-6 * scale || std::abs(fd_im - d) > 1e-6 * scale)
      throw ValidationError("shape '" + f.name + "' is not smooth and analytic near t = " + std::to_string(t));
  }
}

inline void validate_pulse_shape(const ShapeFunction& f) {
  if (f.kind != ShapeKind::pulse) throw ValidationError("shape '" + f.name + "' is not a pulse shape");
  const double T = f.time_scale;
  const double peak = f.value(cplx{0.0, 0.0}).real();
  for (int j = 0; j <= kValidationSamples; ++j) {
    const double t = -kValidationSpan * T + 2.0 * kValidationSpan * T * j / kValidationSamples;
    const double v = f.value(cplx{t, 0.0}).real();
    if (!(v > 0.0 && v <= 1.0))
      throw ValidationError("pulse shape '" + f.name + "' leaves (0, 1] at t = " + std::to_string(t));
    if (v > peak) throw ValidationError("pulse shape '" + f.name + "' does not peak at t = 0");
  }
  check_analytic_derivative(f);
}

inline void validate_monotone_shape(const ShapeFunction& f) {
  if (f.kind != ShapeKind::monotone) throw ValidationError("shape '" + f.name + "' is not a monotone ramp");
  const double T = f.time_scale;
  double prev = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= kValidationSamples; ++j) {
    const double t = -kValidationSpan * T + 2.0 * kValidationSpan * T * j / kValidationSamples;
    const double v = f.value(cplx{t, 0.0}).real();
    if (v < prev - 1e-15) throw ValidationError("ramp '" + f.name + "' decreases near t = " + std::to_string(t));
    if (std::abs(v) > 1.0 + 1e-12) throw ValidationError("ramp '" + f.name + "' leaves [-1, 1]");
    prev = v;
  }
  const double lo = f.value(cplx{-kValidationSpan * T, 0.0}).real();
  const double hi = f.value(cplx{kValidationSpan * T, 0.0}).real();
  if (std::abs(lo + 1.0) > 1e-6 || std::abs(hi - 1.0) > 1e-6)
    throw ValidationError("ramp '" + f.name + "' does not run from -1 to 1");
  check_analytic_derivative(f);
}

}  // namespace detail

/// Omega = Omega0 Lambda(t), Delta = Delta0 sign(t) sqrt(1 - Lambda^2).
inline PulseModel make_parametrized(const ShapeFunction& lambda, double omega0, double delta0) {
  if (!(omega0 > 0.0 && delta0 > 0.0)) throw ValidationError("make_parametrized: Omega0 and Delta0 must be positive");
  detail::validate_pulse_shape(lambda);
  PulseModel m;
  m.label = "parametrized-" + lambda.name;
  m.params = {{"omega0", omega0}, {"delta0", delta0}, {"T", lambda.time_scale}};
  m.time_scale = lambda.time_scale;
  m.energy_scale = std::max(omega0, delta0);
  // sech-like tails decay slowly; 16 T keeps theta within 1e-6 of its limits
  m.window = {-16.0 * lambda.time_scale, 16.0 * lambda.time_scale};
  m.search = {-4.0 * lambda.time_scale, 4.0 * lambda.time_scale, 0.0, 4.0 * lambda.time_scale};
  const auto L = lambda.value;
  const auto dL = lambda.derivative;
  m.omega = [L, omega0](cplx t) { return omega0 * L(t); };
  m.omega_dot = [dL, omega0](cplx t) { return omega0 * dL(t); };
  if (lambda.complement && lambda.complement_derivative) {
    const auto q = *lambda.complement;
    const auto dq = *lambda.complement_derivative;
    m.delta = [q, delta0](cplx t) { return delta0 * q(t); };
    m.delta_dot = [dq, delta0](cplx t) { return delta0 * dq(t); };
  } else {
    m.complex_capable = false;
    m.delta = [L, delta0](cplx t) {
      const double x = t.real();
      const double sgn = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
      const double l = L(cplx{x, 0.0}).real();
      return cplx{delta0 * sgn * std::sqrt(std::max(0.0, 1.0 - l * l)), 0.0};
    };
    m.delta_dot = [L, dL, delta0](cplx t) {
      const double x = t.real();
      const double l = L(cplx{x, 0.0}).real();
      const double q = std::sqrt(std::max(0.0, 1.0 - l * l));
      const double sgn = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
      if (q == 0.0) return cplx{0.0, 0.0};
      return cplx{-delta0 * sgn * l * dL(cplx{x, 0.0}).real() / q, 0.0};
    };
  }
  return m;
}

namespace detail {

inline PulseModel constant_splitting_model(const ShapeFunction& f, double omega0, double detuning_amplitude) {
  PulseModel m;
  const double T = f.time_scale;
  m.time_scale = T;
  m.energy_scale = std::max(omega0, detuning_amplitude);
  m.window = {-6.0 * T, 6.0 * T};
  m.search = {-2.0 * T, 2.0 * T, 0.0, 1.4 * T};
  const auto F = f.value;
  const auto dF = f.derivative;
  static constexpr double half_pi = std::numbers::pi / 2.0;
  m.omega = [F, omega0](cplx t) { return omega0 * std::cos(half_pi * F(t)); };
  m.delta = [F, detuning_amplitude](cplx t) { return detuning_amplitude * std::sin(half_pi * F(t)); };
  m.omega_dot = [F, dF, omega0](cplx t) { return -omega0 * half_pi * dF(t) * std::sin(half_pi * F(t)); };
  m.delta_dot = [F, dF, detuning_amplitude](cplx t) {
    return detuning_amplitude * half_pi * dF(t) * std::cos(half_pi * F(t));
  };
  return m;
}

}  // namespace detail

/// Delta = Omega0 sin(pi f/2), Omega = Omega0 cos(pi f/2): constant splitting
/// Omega0 for any monotone f from -1 to 1.
inline PulseModel make_constant_splitting(const ShapeFunction& f, double omega0) {
  if (!(omega0 > 0.0)) throw ValidationError("make_constant_splitting: Omega0 must be positive");
  detail::validate_monotone_shape(f);
  PulseModel m = detail::constant_splitting_model(f, omega0, omega0);
  m.label = "constant-splitting-" + f.name;
  m.params = {{"omega0", omega0}, {"T", f.time_scale}};
  return m;
}

inline PulseModel make_erf(double omega0, double T) {
  if (!(omega0 > 0.0 && T > 0.0)) throw ValidationError("make_erf: Omega0 and T must be positive");
  PulseModel m = detail::constant_splitting_model(shapes::erf_ramp(T), omega0, omega0);
  m.label = "erf";
  m.params = {{"omega0", omega0}, {"T", T}};
  return m;
}

/// erf model with the detuning amplitude raised to Omega0 + mu.
inline PulseModel make_erf_deviated(double omega0, double T, double mu) {
  if (mu == 0.0) return make_erf(omega0, T);
  if (!(omega0 > 0.0 && T > 0.0)) throw ValidationError("make_erf_deviated: Omega0 and T must be positive");
  if (!(omega0 + mu > 0.0)) throw ValidationError("make_erf_deviated: Omega0 + mu must be positive");
  PulseModel m = detail::constant_splitting_model(shapes::erf_ramp(T), omega0, omega0 + mu);
  m.label = "erf-mu";
  m.params = {{"omega0", omega0}, {"T", T}, {"mu", mu}};
  return m;
}

/// Omega = Omega0, Delta = v t. The single transition point is i Omega0 / v.
inline PulseModel make_landau_zener(double omega0, double v) {
  if (!(omega0 > 0.0 && v > 0.0)) throw ValidationError("make_landau_zener: Omega0 and v must be positive");
  PulseModel m;
  m.label = "landau-zener";
  m.params = {{"omega0", omega0}, {"v", v}};
  m.time_scale = omega0 / v;
  m.energy_scale = omega0;
  const double half = std::max(50.0 / std::sqrt(v), 20.0 * omega0 / v);
  m.window = {-half, half};
  const double s = omega0 / v;
  m.search = {-2.0 * s, 2.0 * s, 0.0, 2.0 * s};
  m.omega = [omega0](cplx) { return cplx{omega0, 0.0}; };
  m.delta = [v](cplx t) { return v * t; };
  m.omega_dot = [](cplx) { return cplx{0.0, 0.0}; };
  m.delta_dot = [v](cplx) { return cplx{v, 0.0}; };
  return m;
}

/// Gaussian coupling with constant splitting:
/// H = (1/2)[[s, g e^{-(t/T)^2}], [g e^{-(t/T)^2}, -s]], i.e. Delta = -s.
///
/// This is the superadiabatic image of the erf model (g = sqrt(pi)/T,
/// s = Omega0) in the orientation where the upper level sits first.
/// alpha = g / s.
inline PulseModel make_gaussian(double coupling, double splitting, double T) {
  if (!(coupling >= 0.0 && splitting > 0.0 && T > 0.0))
    throw ValidationError("make_gaussian: coupling >= 0, splitting > 0 and T > 0 required");
  PulseModel m;
  m.label = "gaussian";
  m.params = {{"omega0", coupling}, {"delta", splitting}, {"T", T}};
  m.time_scale = T;
  m.energy_scale = std::max(coupling, splitting);
  m.window = {-6.0 * T, 6.0 * T};
  m.search = {-4.0 * T, 4.0 * T, 0.0, 4.0 * T};
  m.omega = [coupling, T](cplx t) { return coupling * std::exp(-(t / T) * (t / T)); };
  m.omega_dot = [coupling, T](cplx t) { return -2.0 * coupling * t / (T * T) * std::exp(-(t / T) * (t / T)); };
  m.delta = [splitting](cplx) { return cplx{-splitting, 0.0}; };
  m.delta_dot = [](cplx) { return cplx{0.0, 0.0}; };
  return m;
}

/// Gaussian model seen by the erf model in its adiabatic basis.
inline PulseModel make_superadiabatic_erf(double omega0, double T) {
  PulseModel m = make_gaussian(std::sqrt(std::numbers::pi) / T, omega0, T);
  m.label = "superadiabatic-erf";
  return m;
}

}  // namespace ddpopt
