#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "qclock/qstate.hpp"

namespace qclock {
namespace {

constexpr double kPi = std::numbers::pi;

DensityMatrix plus_state() {
  CVector psi(2);
  psi << 1.0, 1.0;
  return DensityMatrix::pure(psi);
}

ClockSystem random_clock(Index dim, Index rank, Seed seed) {
  return ClockSystem(random_density(dim, rank, seed), random_hamiltonian(dim, seed + 1000));
}

TEST(DensityMatrix, RejectsNonHermitian) {
  CMatrix m = CMatrix::Identity(2, 2) / 2.0;
  m(0, 1) = 1e-6;
  EXPECT_THROW((void)DensityMatrix::from_matrix(m), Error);
}

TEST(DensityMatrix, SymmetrizesRoundingNoise) {
  CMatrix m = CMatrix::Identity(2, 2) / 2.0;
  m(0, 1) = Complex(0.1, 0.0);
  m(1, 0) = Complex(0.1 + 5e-13, 0.0);
  const auto rho = DensityMatrix::from_matrix(m);
  EXPECT_EQ(rho.matrix()(0, 1), std::conj(rho.matrix()(1, 0)));
}

TEST(DensityMatrix, RejectsBadTraceAndNegativity) {
  EXPECT_THROW((void)DensityMatrix::from_matrix(CMatrix::Identity(2, 2)), Error);
  CMatrix m(2, 2);
  m << 1.1, 0.0, 0.0, -0.1;
  try {
    (void)DensityMatrix::from_matrix(m);
    FAIL() << "expected validation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::validation);
  }
}

TEST(Hamiltonian, ReconstructsAndOrdersEigenvalues) {
  const Hamiltonian h = random_hamiltonian(6, 3);
  for (Index k = 1; k < h.dim(); ++k) EXPECT_LE(h.eigenvalues()(k - 1), h.eigenvalues()(k));
  const CMatrix rebuilt = h.eigenvectors() * h.eigenvalues().cast<Complex>().asDiagonal() * h.eigenvectors().adjoint();
  EXPECT_LE(max_abs(rebuilt - h.matrix()), 1e-10);
}

TEST(Hamiltonian, DegenerateBasisIsReproducible) {
  const std::vector<double> spectrum{0.0, 1.0, 1.0, 1.0, 2.0};
  const Hamiltonian a = random_hamiltonian_with_spectrum(spectrum, 5);
  const Hamiltonian b(a.matrix());
  EXPECT_EQ(max_abs(a.eigenvectors() - b.eigenvectors()), 0.0);
}

TEST(Evolve, ZeroTimeIsIdentity) {
  const ClockSystem clock = random_clock(5, 3, 11);
  EXPECT_LE(max_abs(evolve(clock, 0.0).matrix() - clock.state().matrix()), 1e-14);
}

TEST(Evolve, PlusStateTurnsIntoMinusAfterPi) {
  // H = diag(0, 1): exp(-i H pi) = diag(1, -1) maps |+> to |->.
  const ClockSystem clock(plus_state(), Hamiltonian::ladder(2));
  CMatrix minus(2, 2);
  minus << 0.5, -0.5, -0.5, 0.5;
  EXPECT_LE(max_abs(evolve(clock, kPi).matrix() - minus), 1e-14);
}

TEST(Evolve, StationaryStateIsFixed) {
  const Hamiltonian h = random_hamiltonian(4, 21);
  RVector p(4);
  p << 0.1, 0.2, 0.3, 0.4;
  const CMatrix rho = h.eigenvectors() * p.cast<Complex>().asDiagonal() * h.eigenvectors().adjoint();
  const ClockSystem clock(DensityMatrix::from_matrix(rho), h);
  for (double t : {0.3, 2.0, -7.5}) EXPECT_LE(max_abs(evolve(clock, t).matrix() - rho), 1e-12);
}

TEST(Evolve, MatchesPadeExponential) {
  const ClockSystem clock = random_clock(6, 2, 4);
  for (double t : {0.1, 1.3, 9.0}) {
    const CMatrix u = oracle::propagator_pade(clock.hamiltonian().matrix(), t);
    const CMatrix expected = u * clock.state().matrix() * u.adjoint();
    EXPECT_LE(max_abs(evolve(clock, t).matrix() - expected), 1e-10);
  }
}

TEST(Evolve, RejectsNonFiniteTime) {
  const ClockSystem clock = random_clock(2, 1, 1);
  EXPECT_THROW((void)evolve(clock, std::numeric_limits<double>::infinity()), Error);
}

TEST(Evolve, GroupLawSpectrumAndMomentsAreConserved) {
  for (Seed seed = 0; seed < 20; ++seed) {
    const Index dim = 2 + static_cast<Index>(seed % 5);
    const ClockSystem clock = random_clock(dim, 1 + static_cast<Index>(seed % dim), seed);
    const double t = 0.37 * static_cast<double>(seed) - 2.0;
    const double s = 1.1 - 0.2 * static_cast<double>(seed);
    const DensityMatrix two_step = evolve(evolve(clock, t), clock.hamiltonian(), s);
    const DensityMatrix one_step = evolve(clock, t + s);
    EXPECT_LE(max_abs(two_step.matrix() - one_step.matrix()), 1e-10);

    const RVector before = hermitian_eigen(clock.state().matrix()).values;
    const RVector after = hermitian_eigen(one_step.matrix()).values;
    EXPECT_LE((before - after).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(real_trace(one_step.matrix()), 1.0, 1e-12);

    const EnergyMoments m0 = energy_moments(clock);
    const EnergyMoments m1 = energy_moments(one_step, clock.hamiltonian());
    EXPECT_NEAR(m0.mean, m1.mean, 1e-10);
    EXPECT_NEAR(m0.second_moment, m1.second_moment, 1e-10);
  }
}

TEST(GaussianState, SixteenLevelLadderHasRequestedSpread) {
  const Hamiltonian h = Hamiltonian::ladder(16);
  const DensityMatrix rho = gaussian_energy_pure_state(h, 7.5, 2.0);
  EXPECT_NEAR(rho.purity(), 1.0, 1e-10);
  // Oracle: moments summed directly from the amplitudes exp(-(k - 7.5)^2 / 16).
  double norm = 0.0;
  double mean = 0.0;
  double second = 0.0;
  for (int k = 0; k < 16; ++k) {
    const double w = std::exp(-2.0 * (k - 7.5) * (k - 7.5) / 16.0);
    norm += w;
    mean += w * k;
    second += w * k * k;
  }
  mean /= norm;
  second /= norm;
  const double expected_std = std::sqrt(second - mean * mean);
  const EnergyMoments m = energy_moments(rho, h);
  EXPECT_NEAR(m.std_dev, expected_std, 1e-12);
  EXPECT_NEAR(m.mean, 7.5, 1e-12);
  EXPECT_LE(std::abs(m.std_dev - 2.0), 0.05 * 2.0);
}

TEST(GaussianState, SingleLevelGivesEigenstate) {
  const Hamiltonian h = Hamiltonian::ladder(1, 1.0, 3.0);
  const DensityMatrix rho = gaussian_energy_pure_state(h, -4.0, 0.1);
  EXPECT_NEAR(rho.matrix()(0, 0).real(), 1.0, 1e-15);
  EXPECT_EQ(energy_moments(rho, h).std_dev, 0.0);
}

TEST(GaussianState, WideDistributionOnQubitIsBalanced) {
  const DensityMatrix rho = gaussian_energy_pure_state(Hamiltonian::ladder(2), 0.5, 1e6);
  EXPECT_NEAR(rho.matrix()(0, 0).real(), 0.5, 1e-12);
  EXPECT_NEAR(rho.matrix()(0, 1).real(), 0.5, 1e-12);
}

TEST(GaussianState, FarMeanDoesNotUnderflow) {
  const DensityMatrix rho = gaussian_energy_pure_state(Hamiltonian::ladder(4), 500.0, 0.5);
  EXPECT_NEAR(rho.matrix()(3, 3).real(), 1.0, 1e-12);
}

TEST(GaussianState, RejectsNonPositiveWidth) {
  EXPECT_THROW((void)gaussian_energy_pure_state(Hamiltonian::ladder(2), 0.0, 0.0), Error);
  EXPECT_THROW((void)gaussian_energy_pure_state(Hamiltonian::ladder(2), 0.0, -1.0), Error);
}

TEST(GaussianState, OutputsArePureAcrossRandomSpectra) {
  for (Seed seed = 0; seed < 10; ++seed) {
    const Hamiltonian h = random_hamiltonian(3 + static_cast<Index>(seed), seed);
    EXPECT_NEAR(gaussian_energy_pure_state(h, 0.1 * static_cast<double>(seed), 0.7).purity(), 1.0, 1e-10);
  }
}

TEST(EqualSuperposition, FourLevelMoments) {
  const EnergyMoments m = energy_moments(equal_superposition_clock(4, 1.0));
  EXPECT_NEAR(m.mean, 2.5, 1e-14);
  EXPECT_NEAR(m.second_moment, 7.5, 1e-13);
  EXPECT_NEAR(m.std_dev, std::sqrt(1.25), 1e-13);
}

TEST(EqualSuperposition, SingleLevelIsStationary) {
  const ClockSystem clock = equal_superposition_clock(1, 1.0);
  EXPECT_LE(max_abs(evolve(clock, 3.7).matrix() - clock.state().matrix()), 1e-15);
}

TEST(EqualSuperposition, TwoLevelMeanIsExactDiscreteValue) {
  // (1 + 2)/2; the continuum estimate n E / 2 = 1 is off by E/2.
  EXPECT_NEAR(energy_moments(equal_superposition_clock(2, 1.0)).mean, 1.5, 1e-15);
}

TEST(EqualSuperposition, RejectsBadArguments) {
  EXPECT_THROW((void)equal_superposition_clock(0, 1.0), Error);
  EXPECT_THROW((void)equal_superposition_clock(3, 0.0), Error);
}

TEST(EnergyMoments, MaximallyMixedQubit) {
  const EnergyMoments m = energy_moments(DensityMatrix::maximally_mixed(2), Hamiltonian::ladder(2));
  EXPECT_NEAR(m.mean, 0.5, 1e-15);
  EXPECT_NEAR(m.second_moment, 0.5, 1e-15);
  EXPECT_NEAR(m.std_dev, 0.5, 1e-15);
}

TEST(EnergyMoments, Eigenstate) {
  const Hamiltonian h = random_hamiltonian(4, 8);
  const double e = h.eigenvalues()(2);
  const EnergyMoments m = energy_moments(DensityMatrix::pure(h.eigenvectors().col(2)), h);
  EXPECT_NEAR(m.mean, e, 1e-12);
  EXPECT_NEAR(m.second_moment, e * e, 1e-12);
  EXPECT_NEAR(m.std_dev, 0.0, 1e-6);
}

TEST(RandomStates, DeterministicPerSeed) {
  const DensityMatrix a = random_density(4, 4, 1);
  const DensityMatrix b = random_density(4, 4, 1);
  EXPECT_EQ(max_abs(a.matrix() - b.matrix()), 0.0);
  EXPECT_GT(max_abs(a.matrix() - random_density(4, 4, 2).matrix()), 1e-3);
  EXPECT_EQ(max_abs(random_hamiltonian(4, 9).matrix() - random_hamiltonian(4, 9).matrix()), 0.0);
}

TEST(RandomStates, RankIsRespected) {
  EXPECT_NEAR(random_density(4, 1, 7).purity(), 1.0, 1e-10);
  const RVector ev = hermitian_eigen(random_density(8, 3, 7).matrix()).values;
  EXPECT_EQ((ev.array() > 1e-10).count(), 3);
  EXPECT_THROW((void)random_density(3, 4, 0), Error);
  EXPECT_THROW((void)random_density(3, 0, 0), Error);
}

TEST(ClockSystem, RejectsDimensionMismatch) {
  try {
    ClockSystem(random_density(3, 1, 0), Hamiltonian::ladder(2));
    FAIL() << "expected dimension error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
}

}  // namespace
}  // namespace qclock
