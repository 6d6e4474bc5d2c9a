#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <queue>
#include <vector>

#include "ddpopt/errors.hpp"
#include "ddpopt/two_state.hpp"

namespace ddpopt {

struct QuadratureResult {
  cplx value;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  cplx value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const cplx fc = f(c);
  cplx kron = fc * kWgk[7];
  cplx gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const cplx f1 = f(c - dx);
    const cplx f2 = f(c + dx);
    kron += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of a complex-valued
/// function over [a, b].
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-13, double abs_tol = 0.0,
                                    int max_segments = 2000) {
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk15(f, a, b);
  cplx total = first.value;
  double err = first.error;
  heap.push(first);
  int evals = 15;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && static_cast<int>(heap.size()) < max_segments) {
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gk15(f, worst.a, mid);
    const auto right = detail::gk15(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  cplx sum = 0.0;
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  return {sum, esum, evals, esum <= std::max(abs_tol, rel_tol * std::abs(sum))};
}

/// Fixed n-point Gauss-Legendre rule on [a, b] (n = 8), for short segments.
template <class F>
cplx gauss_legendre8(F&& f, double a, double b) {
  static constexpr std::array<double, 4> x = {0.183434642495649804939476142360184, 0.525532409916328985817739049189,
                                              0.796666477413626739591553936476, 0.960289856497536231683560868569};
  static constexpr std::array<double, 4> w = {0.362683783378361982965150449277, 0.313706645877887287337962201987,
                                              0.222381034453374470544355994426, 0.101228536290376259152531354310};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  cplx s = 0.0;
  for (int j = 0; j < 4; ++j) s += w[j] * (f(c - h * x[j]) + f(c + h * x[j]));
  return s * h;
}

/// sqrt of a complex radicand r(s), s in [0, 1], continued from s = 0.
///
/// The path is sampled until consecutive radicand arguments differ by less
/// than pi/2; evaluation at any s then picks the root closest in phase to
/// the nearest sample. At s = 0 the principal root is used unless the
/// radicand vanishes there, in which case the first nonzero sample fixes it.
class BranchTrackedSqrt {
 public:
  BranchTrackedSqrt(std::function<cplx(double)> radicand, int initial_samples = 64, int max_samples = 200000)
      : radicand_(std::move(radicand)) {
    std::vector<double> s(initial_samples + 1);
    for (int j = 0; j <= initial_samples; ++j) s[j] = static_cast<double>(j) / initial_samples;
    std::vector<cplx> r(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) r[j] = radicand_(s[j]);
    // Radicand values this small are treated as zeros (an endpoint on a
    // transition point), where the phase carries no information.
    for (const cplx v : r) floor_ = std::max(floor_, std::abs(v));
    floor_ *= 1e-13;

    // Refine until the radicand turns by less than pi/2 between samples.
    bool refined = true;
    while (refined) {
      refined = false;
      std::vector<double> s2{s.front()};
      std::vector<cplx> r2{r.front()};
      for (std::size_t j = 1; j < s.size(); ++j) {
        if (needs_split(r[j - 1], r[j]) && s[j] - s[j - 1] > 1e-12) {
          const double mid = 0.5 * (s[j - 1] + s[j]);
          s2.push_back(mid);
          r2.push_back(radicand_(mid));
          refined = true;
        }
        s2.push_back(s[j]);
        r2.push_back(r[j]);
      }
      s = std::move(s2);
      r = std::move(r2);
      if (static_cast<int>(s.size()) > max_samples)
        throw PathRefinementError("branch tracking: radicand winds too fast along the path");
    }
    for (std::size_t j = 1; j < s.size(); ++j) {
      if (needs_split(r[j - 1], r[j]))
        throw PathRefinementError("branch tracking: could not resolve radicand phase near s = " +
                                  std::to_string(s[j]));
    }

    s_ = std::move(s);
    root_.assign(s_.size(), cplx{});
    // Near a zero of the radicand the root's phase is roundoff; such
    // samples keep root 0 and never serve as a reference.
    const double reliable = 1e3 * floor_;
    cplx last{};
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (std::abs(r[j]) <= reliable) continue;
      root_[j] = std::abs(last) == 0.0 ? std::sqrt(r[j]) : pick(std::sqrt(r[j]), last);
      last = root_[j];
    }
  }

  cplx operator()(double s) const { return evaluate(s, radicand_(s)); }

  /// Root of a radicand value already known at s.
  cplx evaluate(double s, cplx radicand_value) const {
    const auto it = std::lower_bound(s_.begin(), s_.end(), s);
    std::size_t j = static_cast<std::size_t>(std::distance(s_.begin(), it));
    if (j == s_.size()) j = s_.size() - 1;
    if (j > 0 && std::abs(s_[j - 1] - s) < std::abs(s_[j] - s)) j -= 1;
    cplx ref = root_[j];
    for (std::size_t d = 1; std::abs(ref) == 0.0 && (j >= d || j + d < root_.size()); ++d) {
      if (j + d < root_.size() && std::abs(root_[j + d]) > 0.0) ref = root_[j + d];
      else if (j >= d && std::abs(root_[j - d]) > 0.0) ref = root_[j - d];
    }
    return pick(std::sqrt(radicand_value), ref);
  }

  std::size_t samples() const { return s_.size(); }
  cplx end_value() const { return root_.back(); }
  const std::vector<double>& nodes() const { return s_; }
  const std::vector<cplx>& roots() const { return root_; }

 private:
  bool needs_split(cplx a, cplx b) const {
    if (std::abs(a) <= floor_ || std::abs(b) <= floor_) return false;
    return std::abs(std::arg(b / a)) >= std::numbers::pi / 2.0;
  }
  static cplx pick(cplx root, cplx ref) {
    if (std::abs(ref) == 0.0) return root;
    return (root.real() * ref.real() + root.imag() * ref.imag()) >= 0.0 ? root : -root;
  }

  std::function<cplx(double)> radicand_;
  double floor_ = 0.0;
  std::vector<double> s_;
  std::vector<cplx> root_;
};

}  // namespace ddpopt
