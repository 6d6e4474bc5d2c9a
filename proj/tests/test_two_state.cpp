#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ddpopt/pulse_families.hpp"
#include "ddpopt/two_state.hpp"

using namespace ddpopt;

TEST(MixingAngle, ReferenceValues) {
  constexpr double pi = std::numbers::pi;
  EXPECT_DOUBLE_EQ(mixing_angle(1.0, 0.0).value, pi / 4.0);
  EXPECT_DOUBLE_EQ(mixing_angle(1.0, 1.0).value, pi / 8.0);
  EXPECT_DOUBLE_EQ(mixing_angle(1.0, -1.0).value, 3.0 * pi / 8.0);
  EXPECT_NEAR(mixing_angle(1e-9, 1.0).value, 0.0, 1e-9);
  EXPECT_NEAR(mixing_angle(1e-9, -1.0).value, pi / 2.0, 1e-9);
  EXPECT_DOUBLE_EQ(mixing_angle(std::sqrt(3.0), 1.0).value, pi / 6.0);
}

TEST(MixingAngle, DegenerateInputThrows) { EXPECT_THROW(mixing_angle(0.0, 0.0), DegenerateInputError); }

TEST(MixingAngle, ZeroCouplingIsDiabatic) {
  EXPECT_EQ(mixing_angle(0.0, 2.0).value, 0.0);
  EXPECT_DOUBLE_EQ(mixing_angle(0.0, -2.0).value, std::numbers::pi / 2.0);
}

TEST(AdiabaticRotate, PreservesNormAndInverts) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst_norm = 0.0;
  double worst_back = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const AmplitudePair a{cplx{u(rng), u(rng)}, cplx{u(rng), u(rng)}, Basis::diabatic, 0.0};
    const MixingAngle th = mixing_angle(u(rng), u(rng));
    const AmplitudePair b = adiabatic_rotate(a, th, RotationDirection::to_adiabatic);
    const AmplitudePair c = adiabatic_rotate(b, th, RotationDirection::to_diabatic);
    worst_norm = std::max(worst_norm, std::abs(b.norm() - a.norm()) / a.norm());
    worst_back = std::max(worst_back, std::abs(c.c1 - a.c1) + std::abs(c.c2 - a.c2));
  }
  EXPECT_LT(worst_norm, 1e-14);
  EXPECT_LT(worst_back, 1e-13);
}

TEST(AdiabaticRotate, BasisMismatchThrows) {
  const AmplitudePair adi{1.0, 0.0, Basis::adiabatic, 0.0};
  EXPECT_THROW(adiabatic_rotate(adi, {0.3}, RotationDirection::to_adiabatic), BasisMismatchError);
  const AmplitudePair dia{1.0, 0.0, Basis::diabatic, 0.0};
  EXPECT_THROW(adiabatic_rotate(dia, {0.3}, RotationDirection::to_diabatic), BasisMismatchError);
}

TEST(AdiabaticRotate, ColumnsAreEigenvectors) {
  // phi_- = (cos, -sin) has eigenvalue -E/2 of H
  const double o = 0.7;
  const double d = -1.3;
  const double th = mixing_angle(o, d).value;
  const double e = std::hypot(o, d);
  const double v1 = std::cos(th);
  const double v2 = -std::sin(th);
  EXPECT_NEAR(0.5 * (-d * v1 + o * v2), -0.5 * e * v1, 1e-14);
  EXPECT_NEAR(0.5 * (o * v1 + d * v2), -0.5 * e * v2, 1e-14);
}

TEST(NonadiabaticCoupling, LandauZenerAtCrossing) {
  const PulseModel m = make_landau_zener(2.0, 3.0);
  EXPECT_DOUBLE_EQ(nonadiabatic_coupling(m, 0.0), -3.0 / (2.0 * 2.0));
}

TEST(NonadiabaticCoupling, EqualsThetaDerivative) {
  const PulseModel m = make_gaussian(1.5, 0.8, 1.2);
  for (const double t : {-2.0, -0.7, 0.0, 0.4, 1.9}) {
    const double h = 1e-5;
    const double fd = (mixing_angle(m.omega_real(t + h), m.delta_real(t + h)).value -
                       mixing_angle(m.omega_real(t - h), m.delta_real(t - h)).value) /
                      (2.0 * h);
    EXPECT_NEAR(nonadiabatic_coupling(m, t), fd, 1e-9) << "t = " << t;
  }
}

TEST(NonadiabaticCoupling, ComplexContinuationAgreesOnRealLine) {
  const PulseModel m = make_erf(2.0, 1.0);
  for (const double t : {-1.0, 0.0, 0.5}) {
    const cplx c = complex_nonadiabatic_coupling(m, cplx{t, 0.0});
    EXPECT_NEAR(c.real(), nonadiabatic_coupling(m, t), 1e-14);
    EXPECT_NEAR(c.imag(), 0.0, 1e-14);
  }
}

TEST(Hamiltonian, DiabaticEigenvaluesArePlusMinusHalfSplitting) {
  const PulseModel m = make_gaussian(1.0, 2.0, 1.0);
  const auto h = diabatic_hamiltonian(m, 0.3);
  const cplx tr = h[0][0] + h[1][1];
  const cplx det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
  const double e = eigen_splitting(m, 0.3);
  EXPECT_NEAR(std::abs(tr), 0.0, 1e-15);
  EXPECT_NEAR(det.real(), -0.25 * e * e, 1e-14);
}

TEST(Hamiltonian, AdiabaticCanonicalIsHermitian) {
  const PulseModel m = make_landau_zener(1.0, 1.0);
  const auto h = adiabatic_hamiltonian(m, 0.5);
  EXPECT_LT(std::abs(h[0][1] - std::conj(h[1][0])), 1e-15);
  const double e = eigen_splitting(m, 0.5);
  const double d = m.delta_real(0.5);
  EXPECT_NEAR(h[0][0].real(), 0.5 * (d - e), 1e-15);
  EXPECT_NEAR(h[1][1].real(), 0.5 * (d + e), 1e-15);
}

TEST(Hamiltonian, DisplayedConventionForErfModel) {
  // diag(Omega0, -Omega0), coupling -2 theta' = (sqrt(pi)/T) exp(-(t/T)^2) up to sign
  const double omega0 = 3.0;
  const double T = 1.5;
  const PulseModel m = make_erf(omega0, T);
  const double t = 0.4;
  const auto h = adiabatic_hamiltonian(m, t, HamiltonianConvention::displayed);
  EXPECT_NEAR(h[0][0].real(), omega0, 1e-13);
  EXPECT_NEAR(h[1][1].real(), -omega0, 1e-13);
  EXPECT_NEAR(std::abs(h[0][1].real()), std::sqrt(std::numbers::pi) / T * std::exp(-(t / T) * (t / T)), 1e-13);
}

TEST(Splitting, SquaredAndDerivativeConsistent) {
  const PulseModel m = make_erf_deviated(4.0, 1.0, 1.0);
  const cplx t{0.3, 0.7};
  const cplx h{1e-6, 0.0};
  const cplx fd = (splitting_squared(m, t + h) - splitting_squared(m, t - h)) / (2.0 * h);
  EXPECT_LT(std::abs(fd - splitting_squared_derivative(m, t)), 1e-6 * std::abs(fd));
}
