#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ddpopt/ddp_engine.hpp"
#include "ddpopt/gaussian_analytic.hpp"
#include "ddpopt/pulse_families.hpp"

using namespace ddpopt;

namespace {

constexpr double pi = std::numbers::pi;

// D(tau_0^+) for the Gaussian model with s = T = 1, straight path from 0;
// mpmath at 30 digits.
struct GaussianD {
  double alpha;
  cplx D;
};

const GaussianD kGaussianD[] = {
    {0.05, {0.465721588506346, 1.700695894781822}},
    {0.1, {0.530537741227469, 1.503849005033056}},
    {0.3, {0.711645338657028, 1.166026374971422}},
    {0.5, {0.867304981153593, 1.007521000005166}},
    {1.0, {1.252012717632199, 0.813289469115409}},
    {2.0, {2.061327964287103, 0.663766527830953}},
};

// Omega = 2t, Delta = t^2 - 1: E^2 = (t^2 + 1)^2, a double zero at t = i.
PulseModel coalesced_pair() {
  PulseModel m;
  m.label = "coalesced";
  m.omega = [](cplx t) { return 2.0 * t; };
  m.omega_dot = [](cplx) { return cplx{2.0, 0.0}; };
  m.delta = [](cplx t) { return t * t - 1.0; };
  m.delta_dot = [](cplx t) { return 2.0 * t; };
  m.search = {-2.0, 2.0, 0.0, 2.0};
  return m;
}

}  // namespace

TEST(TransitionSearch, LandauZenerSinglePoint) {
  const PulseModel m = make_landau_zener(1.0, 2.0);
  const auto s = find_transition_points(m);
  ASSERT_EQ(s.points.size(), 1u);
  EXPECT_LT(std::abs(s.points[0].t0 - cplx{0.0, 0.5}), 1e-12);
  EXPECT_EQ(s.points[0].sign, PointSign::on_axis);
  EXPECT_EQ(s.points[0].index_k, 0);
}

TEST(TransitionSearch, GaussianCountMatchesArgumentPrinciple) {
  // 20 zeros of E^2 in [-4, 4] x (0, 4] for each alpha (contour count, mpmath)
  for (const double a : {0.25, 0.5, 1.0, 2.0}) {
    const auto s = find_transition_points(make_gaussian(a, 1.0, 1.0));
    EXPECT_EQ(s.points.size(), 20u) << "alpha = " << a;
  }
}

TEST(TransitionSearch, GaussianOrderingAndLabels) {
  const auto pts = find_transition_points(make_gaussian(0.5, 1.0, 1.0)).points;
  ASSERT_GE(pts.size(), 4u);
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LE(pts[i - 1].t0.imag(), pts[i].t0.imag() + 1e-12);
  EXPECT_EQ(pts[0].index_k, 0);
  EXPECT_EQ(pts[1].index_k, 0);
  EXPECT_EQ(pts[2].index_k, 1);
  EXPECT_NE(pts[0].sign, pts[1].sign);
  for (const auto& p : pts) EXPECT_LT(p.residual, 1e-10);
}

TEST(TransitionSearch, DeviatedErfZeros) {
  // Omega0 T = 4, mu T = 1; zeros from mpmath findroot
  const auto s = find_transition_points(make_erf_deviated(4.0, 1.0, 1.0));
  ASSERT_EQ(s.points.size(), 3u);
  EXPECT_LT(std::abs(s.points[0].t0 - cplx{0.0, 0.556589382034484}), 1e-10);
  EXPECT_EQ(s.points[0].sign, PointSign::on_axis);
  const cplx pair{0.674978779147913, 1.251445270549924};
  const cplx a = s.points[1].t0;
  const cplx b = s.points[2].t0;
  EXPECT_LT(std::min(std::abs(a - pair), std::abs(a + std::conj(pair))), 1e-10);
  EXPECT_LT(std::abs(a + std::conj(b)), 1e-10);
}

TEST(TransitionSearch, NoPointsIsNotAnError) {
  PulseModel m = make_landau_zener(1.0, 1.0);
  m.search = {-1.0, 1.0, 0.0, 0.5};  // the only zero sits at i
  const auto s = find_transition_points(m);
  EXPECT_TRUE(s.no_transition_points());
  const auto r = analyze_ddp(m, {default_search(m), 1e-6});
  EXPECT_TRUE(r.no_points);
  EXPECT_EQ(r.p_multi, 0.0);
  EXPECT_EQ(r.p_single, 0.0);
}

TEST(TransitionSearch, RejectsLowerHalfPlane) {
  const PulseModel m = make_landau_zener(1.0, 1.0);
  SearchOptions o = default_search(m);
  o.region.im_min = -1.0;
  EXPECT_THROW(find_transition_points(m, o), DomainError);
}

TEST(DdpIntegral, LandauZenerClosedForm) {
  // D = i pi Omega0^2 / (4 v)
  const double omega0 = 1.3;
  const double v = 0.7;
  const PulseModel m = make_landau_zener(omega0, v);
  const auto d = ddp_integral(m, cplx{0.0, omega0 / v});
  EXPECT_NEAR(d.value.real(), 0.0, 1e-12);
  EXPECT_NEAR(d.value.imag(), pi * omega0 * omega0 / (4.0 * v), 1e-11);
}

TEST(DdpIntegral, GaussianReferenceValues) {
  for (const auto& c : kGaussianD) {
    const GaussianParams g{c.alpha, 1.0, 1.0};
    const auto d = ddp_integral(make_gaussian(c.alpha, 1.0, 1.0), transition_points_closed(g, 0).first);
    EXPECT_LT(std::abs(d.value - c.D), 1e-11) << "alpha = " << c.alpha;
    EXPECT_LT(d.error, 1e-9 * std::abs(d.value));
  }
}

TEST(DdpIntegral, DeviatedErfReferenceValues) {
  const PulseModel m = make_erf_deviated(4.0, 1.0, 1.0);
  const auto d0 = ddp_integral(m, cplx{0.0, 0.556589382034484});
  EXPECT_LT(std::abs(d0.value - cplx{0.0, 1.86149467083}), 1e-9);
  const auto dp = ddp_integral(m, cplx{0.674978779147913, 1.251445270549924});
  EXPECT_LT(std::abs(dp.value - cplx{3.40190435501, 6.22571004138}), 1e-9);
  const auto dm = ddp_integral(m, cplx{-0.674978779147913, 1.251445270549924});
  EXPECT_LT(std::abs(dm.value + std::conj(dp.value)), 1e-9);
}

TEST(DdpIntegral, SplittingVanishesAtEndpoint) {
  const PulseModel m = make_gaussian(0.5, 1.0, 1.0);
  const auto d = ddp_integral(m, transition_points_closed({0.5, 1.0, 1.0}, 0).first);
  EXPECT_LT(std::abs(d.splitting_near_end), 0.05);
}

TEST(GammaFactor, UnitMagnitudeForSimpleZeros) {
  EXPECT_LT(std::abs(gamma_factor(make_landau_zener(1.0, 1.0), cplx{0.0, 1.0}) - cplx{-1.0, 0.0}), 1e-10);
  const PulseModel m = make_gaussian(0.7, 1.0, 1.0);
  for (int k = 0; k <= 2; ++k) {
    const auto [tp, tm] = transition_points_closed({0.7, 1.0, 1.0}, k);
    const double sgn = k % 2 == 0 ? 1.0 : -1.0;
    EXPECT_LT(std::abs(gamma_factor(m, tp) - sgn), 1e-10) << "k = " << k;
    EXPECT_LT(std::abs(gamma_factor(m, tm) + sgn), 1e-10) << "k = " << k;
  }
}

TEST(GammaFactor, CoalescedPairGivesTwo) {
  // (t - i) theta' -> -1/(2i), so Gamma = -2
  EXPECT_LT(std::abs(gamma_factor(coalesced_pair(), cplx{0.0, 1.0}) - cplx{-2.0, 0.0}), 1e-8);
}

TEST(GammaFactor, RejectsRealPoint) {
  EXPECT_THROW(gamma_factor(make_landau_zener(1.0, 1.0), cplx{0.5, 0.0}), DomainError);
}

TEST(DdpProbability, LandauZenerExact) {
  const double omega0 = 1.0;
  const double v = 2.0;
  const PulseModel m = make_landau_zener(omega0, v);
  const auto pts = find_transition_points(m).points;
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_NEAR(ddp_probability_single(m, pts[0]), std::exp(-pi * omega0 * omega0 / (2.0 * v)), 1e-11);
  const auto r = analyze_ddp(m);
  EXPECT_NEAR(r.p_multi, r.p_single, 1e-12);
}

TEST(DdpProbability, GaussianPairMatchesClosedForm) {
  for (const auto& c : kGaussianD) {
    const PulseModel m = make_gaussian(c.alpha, 1.0, 1.0);
    const auto r = analyze_ddp(m);
    ASSERT_EQ(r.points.size(), 2u) << "alpha = " << c.alpha;
    EXPECT_NEAR(r.p_multi, probability_two_point(c.D.real(), c.D.imag()), 1e-10) << "alpha = " << c.alpha;
    EXPECT_NEAR(r.p_single, std::exp(-2.0 * c.D.imag()), 1e-10);
  }
}

TEST(DdpProbability, ReportedValueIsClipped) {
  MultiPointProbability p;
  p.raw = 1.7;
  EXPECT_EQ(p.reported(), 1.0);
  p.raw = 0.3;
  EXPECT_EQ(p.reported(), 0.3);
}

TEST(DdpProbability, EmptyPointListMeansNoTransition) {
  const auto p = ddp_probability_multi(make_gaussian(1.0, 1.0, 1.0), {});
  EXPECT_TRUE(p.no_points);
  EXPECT_EQ(p.raw, 0.0);
}
