#pragma once

// Closed forms for the Gaussian model (constant splitting s, coupling
// g exp(-(t/T)^2)), which is also the erf model seen in its adiabatic basis.
// Times are dimensionless, tau = t / T; alpha = g / s.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>

#include "ddpopt/errors.hpp"
#include "ddpopt/special_functions.hpp"

namespace ddpopt {

struct GaussianParams {
  double coupling_amplitude = 1.0;
  double splitting = 1.0;
  double T = 1.0;

  double alpha() const { return coupling_amplitude / splitting; }
  double action_scale() const { return splitting * T; }

  /// The erf model's adiabatic-basis image: g = sqrt(pi)/T, s = Omega0.
  static GaussianParams superadiabatic(double omega0, double T) {
    return {std::sqrt(std::numbers::pi) / T, omega0, T};
  }
  /// Standalone model parametrized by alpha and s T.
  static GaussianParams from_alpha(double alpha, double splitting_T) { return {alpha, 1.0, splitting_T}; }
};

namespace gaussian {

inline constexpr double kImDConstant = 1.311468;  ///< m
inline constexpr double kReDNu = 0.462350;        ///< nu in I1
inline constexpr double kReDMu = 0.316193;        ///< mu in I2

inline void require_positive(const GaussianParams& p, const char* what) {
  if (!(p.coupling_amplitude > 0.0 && p.splitting > 0.0 && p.T > 0.0))
    throw DomainError(std::string(what) + ": coupling, splitting and T must be positive");
}

}  // namespace gaussian

/// tau_k^+ and tau_k^- = -conj(tau_k^+).
inline std::pair<cplx, cplx> transition_points_closed(const GaussianParams& p, int k) {
  gaussian::require_positive(p, "transition_points_closed");
  if (k < 0) throw DomainError("transition_points_closed: k must be nonnegative");
  const double la = std::log(p.alpha());
  const double r = std::hypot(2.0 * la, (2 * k + 1) * std::numbers::pi);
  const double xi = 0.5 * std::sqrt(r + 2.0 * la);
  const double eta = 0.5 * std::sqrt(r - 2.0 * la);
  return {cplx{xi, eta}, cplx{-xi, eta}};
}

/// Leading behaviour for alpha << 1: xi ~ (2k+1) pi / (4 sqrt(ln 1/alpha)),
/// eta ~ sqrt(ln 1/alpha).
inline cplx transition_point_small_alpha(const GaussianParams& p, int k) {
  gaussian::require_positive(p, "transition_point_small_alpha");
  if (!(p.alpha() < 1.0)) throw DomainError("transition_point_small_alpha: needs alpha < 1");
  const double l = std::sqrt(std::log(1.0 / p.alpha()));
  return {(2 * k + 1) * std::numbers::pi / (4.0 * l), l};
}

/// Term-by-term integral of s T sqrt(1 + alpha^2 exp(-2 u^2)) from 0 to
/// tau_0^+, truncated after n_max terms.
inline cplx ddp_series_small_alpha(const GaussianParams& p, int n_max) {
  gaussian::require_positive(p, "ddp_series_small_alpha");
  if (!(p.alpha() < 1.0))
    throw DomainError("ddp_series_small_alpha: series requires alpha < 1, got " + std::to_string(p.alpha()));
  if (n_max < 0) throw DomainError("ddp_series_small_alpha: n_max must be nonnegative");
  const cplx tau = transition_points_closed(p, 0).first;
  const double log_alpha = std::log(p.alpha());
  cplx sum = tau;
  double a = 0.5;  // (-1)^{n-1} (2n-3)!! / (2n)!!
  for (int n = 1; n <= n_max; ++n) {
    const double q = std::sqrt(2.0 * n);
    // alpha^{2n} erf(tau sqrt(2n)) without overflow in either factor
    const cplx e = scaled_erf(tau * q, cplx{2.0 * n * log_alpha, 0.0});
    sum += a * std::sqrt(std::numbers::pi) * e / (2.0 * q);
    a *= -(2.0 * n - 1.0) / (2.0 * n + 2.0);
  }
  return p.action_scale() * sum;
}

/// Im D(tau_0^+) ~ (s T / 2) sqrt(sqrt(4 ln^2(m alpha) + pi^2) - 2 ln(m alpha)).
inline double im_d_uniform(const GaussianParams& p) {
  gaussian::require_positive(p, "im_d_uniform");
  const double l = std::log(gaussian::kImDConstant * p.alpha());
  return 0.5 * p.action_scale() * std::sqrt(std::hypot(2.0 * l, std::numbers::pi) - 2.0 * l);
}

/// alpha << 1 limit of im_d_uniform: s T sqrt(ln(m / alpha)).
inline double im_d_small_alpha(const GaussianParams& p) {
  gaussian::require_positive(p, "im_d_small_alpha");
  const double arg = std::log(gaussian::kImDConstant / p.alpha());
  if (!(arg > 0.0)) throw DomainError("im_d_small_alpha: needs alpha < m");
  return p.action_scale() * std::sqrt(arg);
}

struct ReDParts {
  double i1 = 0.0;
  double i2 = 0.0;
  double value = 0.0;  ///< s T (i1 + i2)
};

inline ReDParts re_d_uniform_parts(const GaussianParams& p) {
  if (!(p.alpha() > 0.0))
    throw DomainError("re_d_uniform: alpha must be positive, got " + std::to_string(p.alpha()));
  gaussian::require_positive(p, "re_d_uniform");
  const double a2 = p.alpha() * p.alpha();
  const double x = std::sqrt(a2 + 1.0) - 1.0;
  const double b = 1.0 + gaussian::kReDNu * x;
  const double denom = b * b - 1.0;
  const double inner1 = denom > 0.0 ? 0.5 * std::log(a2 / denom) : -1.0;
  if (!(inner1 >= 0.0))
    throw DomainError("re_d_uniform: I1 logarithm argument out of range at alpha = " + std::to_string(p.alpha()));
  const double l2 = std::log(a2 / (gaussian::kReDMu * (2.0 - gaussian::kReDMu)));
  ReDParts r;
  r.i1 = x * std::sqrt(inner1);
  r.i2 = 0.5 * std::sqrt(std::hypot(l2, std::numbers::pi) + l2);
  r.value = p.action_scale() * (r.i1 + r.i2);
  return r;
}

inline double re_d_uniform(const GaussianParams& p) { return re_d_uniform_parts(p).value; }

/// Two lowest points only: 4 exp(-2 Im D) sin^2(Re D). Unclipped.
inline double probability_two_point(double re_d, double im_d) {
  if (!(im_d >= 0.0)) throw DomainError("probability_two_point: Im D must be nonnegative");
  const double s = std::sin(re_d);
  return 4.0 * std::exp(-2.0 * im_d) * s * s;
}

/// All transition points resummed: sin^2(Re D) / cosh^2(Im D).
inline double probability_all_points(double re_d, double im_d) {
  if (!(im_d >= 0.0)) throw DomainError("probability_all_points: Im D must be nonnegative");
  const double s = std::sin(re_d);
  const double c = std::cosh(im_d);
  return s * s / (c * c);
}

/// D(tau_0^+) from the uniform approximations.
inline cplx ddp_uniform(const GaussianParams& p) { return {re_d_uniform(p), im_d_uniform(p)}; }

}  // namespace ddpopt
