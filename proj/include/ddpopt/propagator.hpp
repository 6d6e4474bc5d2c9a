#pragma once

// Numerical solution of i c' = H(t) c in the diabatic or adiabatic basis.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "ddpopt/dop853.hpp"
#include "ddpopt/two_state.hpp"

namespace ddpopt {

struct PropagationConfig {
  double t_start = -6.0;
  double t_end = 6.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  Basis basis = Basis::diabatic;
  AmplitudePair initial{1.0, 0.0, Basis::diabatic, -6.0};
};

struct TransitionResult {
  double p_diabatic = 0.0;   ///< P = 1 - p_adiabatic
  double p_adiabatic = 0.0;  ///< transition probability between adiabatic states
  AmplitudePair final;
  double norm_drift = 0.0;
  double error_estimate = 0.0;  ///< heuristic bound on the error of p_adiabatic
  long steps = 0;
  std::vector<std::string> warnings;
};

namespace detail {

inline void validate(const PropagationConfig& cfg) {
  if (!(cfg.t_start < cfg.t_end)) throw DomainError("PropagationConfig: t_start must precede t_end");
  const auto tol_ok = [](double v) { return v > 0.0 && v <= 1e-3; };
  if (!tol_ok(cfg.rel_tol) || !tol_ok(cfg.abs_tol)) throw DomainError("PropagationConfig: tolerances must lie in (0, 1e-3]");
}

using State2 = std::array<cplx, 2>;

inline auto diabatic_rhs(const PulseModel& m) {
  return [&m](double t, const State2& c) -> State2 {
    const double o = m.omega_real(t);
    const double d = m.delta_real(t);
    const cplx mi{0.0, -0.5};
    return {mi * (-d * c[0] + o * c[1]), mi * (o * c[0] + d * c[1])};
  };
}

// Traceless form R^-1 H R - i R^-1 R': diag(-E/2, E/2) with coupling
// -+ i theta'. The common Delta/2 shift of adiabatic_hamiltonian is omitted
// so phases agree with diabatic propagation followed by a rotation.
inline auto adiabatic_rhs(const PulseModel& m) {
  return [&m](double t, const State2& a) -> State2 {
    const double o = m.omega_real(t);
    const double d = m.delta_real(t);
    const double e2 = o * o + d * d;
    if (e2 == 0.0) throw BasisMismatchError("adiabatic propagation: degenerate splitting at t = " + std::to_string(t));
    const double e = std::sqrt(e2);
    const double thd = (m.omega_dot_real(t) * d - m.delta_dot_real(t) * o) / (2.0 * e2);
    const cplx i{0.0, 1.0};
    // a' = -i Ha a
    return {-i * (-0.5 * e * a[0] - i * thd * a[1]), -i * (i * thd * a[0] + 0.5 * e * a[1])};
  };
}

// Tolerances in PropagationConfig bound the error over the whole window;
// the integrator's per-step tolerance is a tenth of that, since local
// errors accumulate over thousands of steps.
inline constexpr double kLocalTolFraction = 0.1;

inline OdeOptions integrator_options(const PropagationConfig& cfg) {
  OdeOptions o;
  o.rel_tol = kLocalTolFraction * cfg.rel_tol;
  o.abs_tol = kLocalTolFraction * cfg.abs_tol;
  return o;
}

}  // namespace detail

/// Propagate `amps` from amps.time to `t_to` in the given basis. Works in
/// either time direction.
inline OdeSolution<2> evolve(const PulseModel& model, const AmplitudePair& amps, double t_to, Basis basis,
                             const OdeOptions& opt) {
  if (basis == Basis::adiabatic) {
    // the integrator would step over an isolated real crossing unnoticed
    if (const auto bad = real_axis_degeneracy(model, std::min(amps.time, t_to), std::max(amps.time, t_to)))
      throw BasisMismatchError("adiabatic propagation: splitting vanishes at t = " + std::to_string(*bad));
  }
  const AmplitudePair start = to_basis(amps, basis, model);
  const detail::State2 y0{start.c1, start.c2};
  if (basis == Basis::diabatic) return integrate_dop853<2>(detail::diabatic_rhs(model), start.time, t_to, y0, opt);
  return integrate_dop853<2>(detail::adiabatic_rhs(model), start.time, t_to, y0, opt);
}

/// Solve the Schroedinger equation on [t_start, t_end]. The initial state
/// is converted to cfg.basis if needed; the result is in cfg.basis.
inline AmplitudePair propagate(const PulseModel& model, const PropagationConfig& cfg) {
  detail::validate(cfg);
  AmplitudePair init = cfg.initial;
  init.time = cfg.t_start;
  const auto sol = evolve(model, init, cfg.t_end, cfg.basis, detail::integrator_options(cfg));
  return {sol.y[0], sol.y[1], cfg.basis, cfg.t_end};
}

/// Index (0 = phi_-, 1 = phi_+) of the adiabatic state with the larger
/// overlap with psi_1 at time t.
inline int adiabatic_state_of_psi1(const PulseModel& model, double t) {
  const double theta = mixing_angle(model.omega_real(t), model.delta_real(t)).value;
  // <psi_1|phi_-> = cos theta, <psi_1|phi_+> = sin theta
  return std::abs(std::sin(theta)) > std::abs(std::cos(theta)) ? 1 : 0;
}

/// Configuration with the model's default window and the system starting
/// in the exact adiabatic eigenstate connected to psi_1.
inline PropagationConfig default_config(const PulseModel& model, Basis basis = Basis::diabatic,
                                        double rel_tol = 1e-10) {
  PropagationConfig cfg;
  cfg.t_start = model.window.start;
  cfg.t_end = model.window.end;
  cfg.rel_tol = rel_tol;
  cfg.abs_tol = std::min(1e-3, rel_tol * 1e-2);
  cfg.basis = basis;
  const int idx = adiabatic_state_of_psi1(model, cfg.t_start);
  cfg.initial = {idx == 0 ? cplx{1.0} : cplx{0.0}, idx == 1 ? cplx{1.0} : cplx{0.0}, Basis::adiabatic, cfg.t_start};
  return cfg;
}

/// Adiabatic-basis transition probability over the configured window.
///
/// The initial state in cfg is replaced by the adiabatic eigenstate of
/// H(t_start) connected to psi_1; the final amplitudes are projected onto
/// the adiabatic states of H(t_end).
inline TransitionResult transition_probability(const PulseModel& model, const PropagationConfig& cfg) {
  detail::validate(cfg);
  TransitionResult res;
  const int idx = adiabatic_state_of_psi1(model, cfg.t_start);
  const AmplitudePair init{idx == 0 ? cplx{1.0} : cplx{0.0}, idx == 1 ? cplx{1.0} : cplx{0.0}, Basis::adiabatic,
                           cfg.t_start};

  for (const double t : {cfg.t_start, cfg.t_end}) {
    const double theta = mixing_angle(model.omega_real(t), model.delta_real(t)).value;
    const double dev = std::min(std::abs(theta), std::abs(theta - std::numbers::pi / 2.0));
    if (dev > 1e-6)
      res.warnings.push_back("window too narrow: theta(" + std::to_string(t) + ") is " + std::to_string(dev) +
                             " from an asymptotic value");
  }

  const auto sol = evolve(model, init, cfg.t_end, cfg.basis, detail::integrator_options(cfg));
  const AmplitudePair fin =
      to_basis(AmplitudePair{sol.y[0], sol.y[1], cfg.basis, cfg.t_end}, Basis::adiabatic, model);
  const double norm = fin.norm();
  const double other = idx == 0 ? std::norm(fin.c2) : std::norm(fin.c1);
  res.final = fin;
  res.norm_drift = std::abs(norm - 1.0);
  res.p_adiabatic = std::clamp(other, 0.0, 1.0);
  res.p_diabatic = 1.0 - res.p_adiabatic;
  res.error_estimate = 2.0 * std::sqrt(res.p_adiabatic) * sol.local_error_sum + res.norm_drift +
                       sol.local_error_sum * sol.local_error_sum;
  res.steps = sol.accepted;
  return res;
}

}  // namespace ddpopt
