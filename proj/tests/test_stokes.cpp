#include <gtest/gtest.h>

#include <cmath>

#include "ddpopt/gaussian_analytic.hpp"
#include "ddpopt/pulse_families.hpp"
#include "ddpopt/stokes.hpp"

using namespace ddpopt;

namespace {

// Omega = t - 0.3, Delta = 0: the levels touch on the real axis.
PulseModel real_crossing() {
  PulseModel m;
  m.label = "real-crossing";
  m.omega = [](cplx t) { return t - 0.3; };
  m.omega_dot = [](cplx) { return cplx{1.0, 0.0}; };
  m.delta = [](cplx) { return cplx{0.0, 0.0}; };
  m.delta_dot = [](cplx) { return cplx{0.0, 0.0}; };
  return m;
}

}  // namespace

TEST(Stokes, LandauZenerLineSpansRealAxis) {
  const PulseModel m = make_landau_zener(1.0, 1.0);
  const auto r = stokes_check(m, cplx{0.0, 1.0});
  EXPECT_TRUE(r.ok) << r.message;
  EXPECT_TRUE(r.reached_plus);
  EXPECT_TRUE(r.reached_minus);
  EXPECT_EQ(r.rays.size(), 3u);
}

TEST(Stokes, GaussianLowestPointsQualify) {
  for (const double a : {0.3, 1.0, 2.0}) {
    const PulseModel m = make_gaussian(a, 1.0, 1.0);
    const auto [tp, tm] = transition_points_closed({a, 1.0, 1.0}, 0);
    for (const cplx t0 : {tp, tm}) {
      const auto r = stokes_check(m, t0);
      EXPECT_TRUE(r.ok) << "alpha = " << a << ": " << r.message;
    }
  }
}

TEST(Stokes, LevelIsConstantAlongRays) {
  const PulseModel m = make_gaussian(0.5, 1.0, 1.0);
  const cplx t0 = transition_points_closed({0.5, 1.0, 1.0}, 0).first;
  const double level = ddp_integral(m, t0).value.imag();
  const auto r = stokes_check(m, t0);
  ASSERT_TRUE(r.ok);
  for (const auto& ray : r.rays) {
    if (ray.end != RayEnd::plus_infinity && ray.end != RayEnd::minus_infinity) continue;
    // sample a few interior points of the traced path
    for (std::size_t j = 2; j < ray.path.size(); j += std::max<std::size_t>(1, ray.path.size() / 5)) {
      const cplx t = ray.path[j];
      if (t.imag() < 1e-3) continue;
      EXPECT_NEAR(ddp_integral(m, t).value.imag(), level, 1e-6) << "t = " << t;
    }
  }
}

TEST(Stokes, RealAxisDegeneracyFails) {
  const PulseModel m = real_crossing();
  const auto bad = real_axis_degeneracy(m);
  ASSERT_TRUE(bad.has_value());
  EXPECT_NEAR(*bad, 0.3, 1e-6);
  const auto r = stokes_check(m, cplx{0.3, 0.5});
  EXPECT_FALSE(r.ok);
  ASSERT_TRUE(r.failure_location.has_value());
  EXPECT_NEAR(r.failure_location->real(), 0.3, 1e-6);
  EXPECT_EQ(r.failure_location->imag(), 0.0);
}

TEST(Stokes, NoDegeneracyForGappedModels) {
  EXPECT_FALSE(real_axis_degeneracy(make_gaussian(1.0, 1.0, 1.0)).has_value());
  EXPECT_FALSE(real_axis_degeneracy(make_erf(2.0, 1.0)).has_value());
}

TEST(Stokes, RejectsPointOffUpperHalfPlane) {
  const auto r = stokes_check(make_landau_zener(1.0, 1.0), cplx{0.0, -1.0});
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.message.empty());
}

TEST(Stokes, RefusesRealOnlyModel) {
  const PulseModel m = make_parametrized(
      [] {
        ShapeFunction s = shapes::sech_pulse(1.0);
        s.complement.reset();
        return s;
      }(),
      1.0, 1.0);
  EXPECT_THROW(stokes_check(m, cplx{0.0, 1.0}), CapabilityError);
}
