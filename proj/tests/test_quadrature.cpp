#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ddpopt/quadrature.hpp"

using namespace ddpopt;

TEST(AdaptiveQuadrature, SmoothComplexIntegrand) {
  const auto r = integrate_adaptive([](double x) { return std::exp(cplx{0.0, 3.0} * x); }, 0.0, 2.0);
  const cplx want = (std::exp(cplx{0.0, 6.0}) - 1.0) / cplx{0.0, 3.0};
  EXPECT_TRUE(r.converged);
  EXPECT_LT(std::abs(r.value - want), 1e-14);
  EXPECT_GE(r.error, 0.0);
}

TEST(AdaptiveQuadrature, EndpointSingularity) {
  // integral of x^-1/2 over [0, 1] is 2
  const auto r = integrate_adaptive([](double x) { return cplx{1.0 / std::sqrt(x), 0.0}; }, 0.0, 1.0, 1e-10);
  EXPECT_NEAR(r.value.real(), 2.0, 1e-8);
}

TEST(AdaptiveQuadrature, ReportsNonConvergence) {
  const auto r = integrate_adaptive([](double x) { return cplx{std::sin(1.0 / (x + 1e-6)), 0.0}; }, 0.0, 1.0, 1e-15,
                                    0.0, 10);
  EXPECT_FALSE(r.converged);
}

TEST(GaussLegendre8, ExactForDegreeFifteen) {
  const auto f = [](double x) { return cplx{std::pow(x, 15) + 3.0 * std::pow(x, 8), std::pow(x, 2)}; };
  const cplx v = gauss_legendre8(f, -1.0, 2.0);
  const double re = (std::pow(2.0, 16) - 1.0) / 16.0 + 3.0 * (std::pow(2.0, 9) + 1.0) / 9.0;
  const double im = (8.0 + 1.0) / 3.0;
  EXPECT_NEAR(v.real(), re, 1e-10 * re);
  EXPECT_NEAR(v.imag(), im, 1e-13);
}

TEST(BranchTrackedSqrt, FollowsWindingRadicand) {
  // r(s) = exp(2 pi i s): continuous root ends at exp(i pi) = -1
  BranchTrackedSqrt root([](double s) { return std::exp(cplx{0.0, 2.0 * std::numbers::pi * s}); });
  EXPECT_LT(std::abs(root.end_value() - cplx{-1.0, 0.0}), 1e-12);
  for (const double s : {0.1, 0.37, 0.5, 0.81, 0.99}) {
    EXPECT_LT(std::abs(root(s) - std::exp(cplx{0.0, std::numbers::pi * s})), 1e-12) << "s = " << s;
  }
}

TEST(BranchTrackedSqrt, PrincipalRootAtStart) {
  BranchTrackedSqrt root([](double s) { return cplx{-1.0 - s, -1e-3}; });
  EXPECT_LT(std::abs(root(0.0) - std::sqrt(cplx{-1.0, -1e-3})), 1e-14);
}

TEST(BranchTrackedSqrt, VanishingEndpointKeepsContinuity) {
  // r(s) = (1 - s) e^{i phi}: the root at s -> 1 shrinks without a phase jump
  const cplx ph = std::exp(cplx{0.0, 2.5});
  BranchTrackedSqrt root([ph](double s) { return (1.0 - s) * ph; });
  const cplx ref = root(0.5) / std::abs(root(0.5));
  for (const double s : {0.9, 0.999, 0.999999}) {
    const cplx v = root(s);
    EXPECT_GT((v / std::abs(v) * std::conj(ref)).real(), 0.999) << "s = " << s;
  }
}
