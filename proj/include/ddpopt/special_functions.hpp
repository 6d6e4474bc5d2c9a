#pragma once

// Error function of complex argument.
//
// Small |z| uses the Maclaurin series. Elsewhere erf is obtained from the
// Faddeeva function w(z) = exp(-z^2) erfc(-iz), which is evaluated with
// Weideman's rational approximation (SIAM J. Numer. Anal. 31, 1994) using
// N = 40 terms; that choice is accurate to ~1e-15 relative in the closed
// upper half-plane.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace ddpopt {

using cplx = std::complex<double>;

namespace detail {

struct WeidemanTable {
  static constexpr int kTerms = 40;
  double L = 0.0;
  // p(Z) = sum_{m=0}^{kTerms-1} coeff[m] Z^m
  std::array<double, kTerms> coeff{};

  WeidemanTable() {
    constexpr int M = 2 * kTerms;
    constexpr int M2 = 2 * M;
    L = std::sqrt(kTerms / std::numbers::sqrt2);
    std::array<double, M2> f{};  // f[k + M], k in (-M, M)
    for (int k = -M + 1; k < M; ++k) {
      const double t = L * std::tan(k * std::numbers::pi / (2.0 * M));
      f[k + M] = std::exp(-t * t) * (L * L + t * t);
    }
    // Real part of the DFT of the (even) shifted sample vector.
    for (int m = 1; m <= kTerms; ++m) {
      double acc = 0.0;
      for (int k = -M + 1; k < M; ++k) {
        acc += f[k + M] * std::cos(2.0 * std::numbers::pi * k * m / M2);
      }
      coeff[m - 1] = acc / M2;
    }
  }
};

inline const WeidemanTable& weideman_table() {
  static const WeidemanTable table;
  return table;
}

// Upper half-plane only.
inline cplx faddeeva_upper(cplx z) {
  const auto& tab = weideman_table();
  const cplx iz{-z.imag(), z.real()};
  const cplx den = tab.L - iz;
  const cplx Z = (tab.L + iz) / den;
  cplx p = 0.0;
  for (int m = WeidemanTable::kTerms - 1; m >= 0; --m) p = p * Z + tab.coeff[m];
  return 2.0 * p / (den * den) + (1.0 / std::sqrt(std::numbers::pi)) / den;
}

inline cplx erf_maclaurin(cplx z) {
  const cplx z2 = z * z;
  cplx term = z;  // (-1)^n z^{2n+1} / n!
  cplx sum = z;
  for (int n = 1; n < 200; ++n) {
    term *= -z2 / static_cast<double>(n);
    const cplx add = term / static_cast<double>(2 * n + 1);
    sum += add;
    if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
  }
  return sum * (2.0 / std::sqrt(std::numbers::pi));
}

inline constexpr double kMaclaurinRadius = 2.0;

}  // namespace detail

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for any complex z.
inline cplx faddeeva_w(cplx z) {
  if (z.imag() >= 0.0) return detail::faddeeva_upper(z);
  // w(z) = 2 exp(-z^2) - w(-z)
  return 2.0 * std::exp(-z * z) - detail::faddeeva_upper(-z);
}

struct ErfValue {
  cplx value;
  bool saturated = false;  ///< true where |erf(z)| exceeds double range
};

/// erf(z) with an explicit overflow flag. Saturated results carry the
/// asymptotic phase with magnitude DBL_MAX.
inline ErfValue complex_erf_checked(cplx z) {
  if (z.imag() == 0.0) return {cplx{std::erf(z.real()), 0.0}, false};
  if (std::abs(z) < detail::kMaclaurinRadius) return {detail::erf_maclaurin(z), false};
  const bool flip = z.real() < 0.0;
  const cplx zp = flip ? -z : z;
  const cplx mz2 = -zp * zp;
  if (mz2.real() > 700.0) {
    // |erf| ~ |exp(-z^2) w(iz)|; keep the phase of the dominant term.
    const cplx dominant_phase = std::exp(cplx{0.0, mz2.imag()}) * faddeeva_w(cplx{-zp.imag(), zp.real()});
    const cplx unit = -dominant_phase / std::abs(dominant_phase);
    const cplx v = unit * std::numeric_limits<double>::max();
    return {flip ? -v : v, true};
  }
  const cplx v = 1.0 - std::exp(mz2) * faddeeva_w(cplx{-zp.imag(), zp.real()});
  return {flip ? -v : v, false};
}

inline cplx complex_erf(cplx z) { return complex_erf_checked(z).value; }

/// exp(log_scale) * erf(z), evaluated without forming exp(-z^2) or
/// exp(log_scale) separately. Stays finite when erf(z) is huge and the
/// scale is tiny (the case in the small-coupling DDP series).
inline cplx scaled_erf(cplx z, cplx log_scale) {
  if (std::abs(z) < detail::kMaclaurinRadius) return std::exp(log_scale) * detail::erf_maclaurin(z);
  const bool flip = z.real() < 0.0;
  const cplx zp = flip ? -z : z;
  const cplx head = std::exp(log_scale);
  const cplx tail = std::exp(log_scale - zp * zp) * faddeeva_w(cplx{-zp.imag(), zp.real()});
  const cplx v = head - tail;
  return flip ? -v : v;
}

/// exp(z) - 1 with full relative accuracy near z = 0.
inline cplx complex_expm1(cplx z) {
  if (std::abs(z) > 0.1) return std::exp(z) - 1.0;
  cplx term = z;
  cplx sum = z;
  for (int n = 2; n < 30; ++n) {
    term *= z / static_cast<double>(n);
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace ddpopt
