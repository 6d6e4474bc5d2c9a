#pragma once

// Explicit Runge-Kutta 8(5,3) of Dormand and Prince (Hairer, Norsett,
// Wanner, "Solving ODEs I", DOP853) for complex state vectors.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <string>
#include <utility>

#include "ddpopt/errors.hpp"

namespace ddpopt {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  ///< 0 selects automatically
  double max_step = 0.0;      ///< 0 means unbounded
  long max_steps = 5'000'000;
};

template <std::size_t N>
struct OdeSolution {
  std::array<std::complex<double>, N> y;
  double t = 0.0;
  long accepted = 0;
  long rejected = 0;
  /// Sum over accepted steps of the scaled local error estimate; a
  /// heuristic bound on the global error of a non-expanding system.
  double local_error_sum = 0.0;
};

namespace dop853 {

inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;

inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;

inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;

inline constexpr double bhh1 = 0.244094488188976377952755905512e+00;
inline constexpr double bhh2 = 0.733846688281611857341361741547e+00;
inline constexpr double bhh3 = 0.220588235294117647058823529412e-01;

inline constexpr double er1 = 0.1312004499419488073250102996e-01;
inline constexpr double er6 = -0.1225156446376204440720569753e+01;
inline constexpr double er7 = -0.4957589496572501915214079952e+00;
inline constexpr double er8 = 0.1664377182454986536961530415e+01;
inline constexpr double er9 = -0.3503288487499736816886487290e+00;
inline constexpr double er10 = 0.3341791187130174790297318841e+00;
inline constexpr double er11 = 0.8192320648511571246570742613e-01;
inline constexpr double er12 = -0.2235530786388629525884427845e-01;

}  // namespace dop853

/// Integrate y' = f(t, y) from t0 to t1 (either direction).
///
/// `Rhs` is callable as `State f(double t, const State& y)` where
/// `State = std::array<std::complex<double>, N>`.
template <std::size_t N, class Rhs>
OdeSolution<N> integrate_dop853(Rhs&& f, double t0, double t1, const std::array<std::complex<double>, N>& y0,
                                const OdeOptions& opt = {}) {
  using State = std::array<std::complex<double>, N>;
  using namespace dop853;

  const auto combine = [](const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (std::size_t i = 0; i < N; ++i) {
      std::complex<double> acc = 0.0;
      for (const auto& [c, k] : terms) acc += c * (*k)[i];
      out[i] += h * acc;
    }
    return out;
  };

  OdeSolution<N> sol{y0, t0};
  if (t0 == t1) return sol;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  const double hmax = opt.max_step > 0.0 ? opt.max_step : span;
  constexpr double n_real = 2.0 * N;

  const auto scaled_norm = [&](const State& a, const State& y_old, const State& y_new) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sre = opt.abs_tol + opt.rel_tol * std::max(std::abs(y_old[i].real()), std::abs(y_new[i].real()));
      const double sim = opt.abs_tol + opt.rel_tol * std::max(std::abs(y_old[i].imag()), std::abs(y_new[i].imag()));
      acc += std::pow(a[i].real() / sre, 2) + std::pow(a[i].imag() / sim, 2);
    }
    return acc;
  };

  State y = y0;
  double t = t0;
  State k1 = f(t, y);

  double h = opt.initial_step;
  if (h <= 0.0) {
    // Hairer's starting-step heuristic, first stage only.
    double dnf = 0.0;
    double dny = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
      dnf += std::norm(k1[i]) / (sk * sk);
      dny += std::norm(y[i]) / (sk * sk);
    }
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, hmax);
  }
  h = std::min(h, span);

  constexpr double safe = 0.9;
  constexpr double fac_min = 0.333;
  constexpr double fac_max = 6.0;
  bool last_rejected = false;

  while (dir * (t1 - t) > 0.0) {
    if (sol.accepted + sol.rejected >= opt.max_steps)
      throw StiffnessError("integrate_dop853: step budget exhausted at t = " + std::to_string(t));
    const double resolution = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), span);
    if (h < resolution)
      throw StiffnessError("integrate_dop853: step size underflow at t = " + std::to_string(t));
    bool final_step = false;
    if (h >= std::abs(t1 - t)) {
      h = std::abs(t1 - t);
      final_step = true;
    }
    const double hs = dir * h;

    const State k2 = f(t + c2 * hs, combine(y, hs, {{a21, &k1}}));
    const State k3 = f(t + c3 * hs, combine(y, hs, {{a31, &k1}, {a32, &k2}}));
    const State k4 = f(t + c4 * hs, combine(y, hs, {{a41, &k1}, {a43, &k3}}));
    const State k5 = f(t + c5 * hs, combine(y, hs, {{a51, &k1}, {a53, &k3}, {a54, &k4}}));
    const State k6 = f(t + c6 * hs, combine(y, hs, {{a61, &k1}, {a64, &k4}, {a65, &k5}}));
    const State k7 = f(t + c7 * hs, combine(y, hs, {{a71, &k1}, {a74, &k4}, {a75, &k5}, {a76, &k6}}));
    const State k8 = f(t + c8 * hs, combine(y, hs, {{a81, &k1}, {a84, &k4}, {a85, &k5}, {a86, &k6}, {a87, &k7}}));
    const State k9 =
        f(t + c9 * hs, combine(y, hs, {{a91, &k1}, {a94, &k4}, {a95, &k5}, {a96, &k6}, {a97, &k7}, {a98, &k8}}));
    const State k10 = f(t + c10 * hs, combine(y, hs,
                                              {{a101, &k1},
                                               {a104, &k4},
                                               {a105, &k5},
                                               {a106, &k6},
                                               {a107, &k7},
                                               {a108, &k8},
                                               {a109, &k9}}));
    const State k11 = f(t + c11 * hs, combine(y, hs,
                                              {{a111, &k1},
                                               {a114, &k4},
                                               {a115, &k5},
                                               {a116, &k6},
                                               {a117, &k7},
                                               {a118, &k8},
                                               {a119, &k9},
                                               {a1110, &k10}}));
    const double t_new = final_step ? t1 : t + hs;
    const State k12 = f(t_new, combine(y, hs,
                                       {{a121, &k1},
                                        {a124, &k4},
                                        {a125, &k5},
                                        {a126, &k6},
                                        {a127, &k7},
                                        {a128, &k8},
                                        {a129, &k9},
                                        {a1210, &k10},
                                        {a1211, &k11}}));

    State incr{};
    State err5{};
    State err3{};
    for (std::size_t i = 0; i < N; ++i) {
      incr[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] + b11 * k11[i] +
                b12 * k12[i];
      err3[i] = incr[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i];
      err5[i] = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] + er10 * k10[i] +
                er11 * k11[i] + er12 * k12[i];
    }
    State y_new = y;
    for (std::size_t i = 0; i < N; ++i) y_new[i] += hs * incr[i];

    const double e5 = scaled_norm(err5, y, y_new);
    const double e3 = scaled_norm(err3, y, y_new);
    double deno = e5 + 0.01 * e3;
    if (deno <= 0.0) deno = 1.0;
    const double err = h * e5 * std::sqrt(1.0 / (n_real * deno));

    if (!std::isfinite(err)) throw StiffnessError("integrate_dop853: non-finite error estimate");

    if (err <= 1.0) {
      double ymag = 0.0;
      for (const auto& v : y_new) ymag = std::max(ymag, std::abs(v));
      sol.local_error_sum += err * (opt.abs_tol + opt.rel_tol * ymag);
      t = t_new;
      y = y_new;
      k1 = f(t, y);
      ++sol.accepted;
      double fac = err == 0.0 ? fac_max : std::clamp(safe * std::pow(err, -0.125), fac_min, fac_max);
      if (last_rejected) fac = std::min(fac, 1.0);
      h = std::min(h * fac, hmax);
      last_rejected = false;
      if (final_step) break;
    } else {
      h *= std::max(fac_min, safe * std::pow(err, -0.125));
      ++sol.rejected;
      last_rejected = true;
    }
  }
  sol.y = y;
  sol.t = t;
  return sol;
}

}  // namespace ddpopt
