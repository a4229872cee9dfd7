#include <gtest/gtest.h>

#include "qclock/bounds.hpp"
#include "qclock/sweep.hpp"

namespace qclock {
namespace {

struct Split {
  Hamiltonian h1;
  Hamiltonian h2;
  Hamiltonian total;
};

Split qubit_pair() {
  Hamiltonian h1 = Hamiltonian::ladder(2);
  Hamiltonian h2 = Hamiltonian::ladder(2);
  Hamiltonian total = total_hamiltonian(h1, h2);
  return {h1, h2, total};
}

TEST(CopyBound, AppendedStationaryStateCarriesNothing) {
  const ClockSystem clock(random_density(3, 2, 4), Hamiltonian::ladder(3));
  const Hamiltonian h2 = Hamiltonian::ladder(2);
  const QuantumChannel g = append_state(3, DensityMatrix::maximally_mixed(2));
  const CopyBoundReport r = copy_bound_check(clock, g, clock.hamiltonian(), h2);
  EXPECT_NEAR(r.f1, r.f_in, 1e-10 * std::max(1.0, r.f_in));
  EXPECT_LE(r.f2, 1e-12);
  EXPECT_TRUE(std::isinf(r.lhs));
  EXPECT_TRUE(r.satisfied);
}

TEST(CopyBound, ClockWithoutTimingInformation) {
  const Split s = qubit_pair();
  const ClockSystem clock(DensityMatrix::maximally_mixed(3), Hamiltonian::ladder(3));
  for (Seed seed = 0; seed < 5; ++seed) {
    const QuantumChannel g = covariant_twirl(random_channel(3, 4, 2, seed), clock.hamiltonian(), s.total);
    const CopyBoundReport r = copy_bound_check(clock, g, s.h1, s.h2);
    EXPECT_EQ(r.f_in, 0.0);
    EXPECT_LE(r.f1, 1e-12);
    EXPECT_LE(r.f2, 1e-12);
    EXPECT_TRUE(r.satisfied);
  }
}

TEST(CopyBound, EqualSuperpositionMonteCarlo) {
  const Split s = qubit_pair();
  const ClockSystem clock = equal_superposition_clock(4, 1.0);
  for (Seed seed = 0; seed < 100; ++seed) {
    const Index rank = 1 + static_cast<Index>(seed % 4);
    const QuantumChannel g = covariant_twirl(random_channel(4, 4, rank, seed), clock.hamiltonian(), s.total);
    const CopyBoundReport r = copy_bound_check(clock, g, s.h1, s.h2);
    EXPECT_GE(r.margin, -1e-8) << "seed " << seed;
    EXPECT_LE(r.covariance_residual, 1e-9);
  }
}

TEST(CopyBound, IdentitySplitOfProductClockViolatesLiteralInequality) {
  // |+>|+> with H1 = H2 = diag(0, 1); the identity channel is a covariant
  // broadcast onto the two qubits. F = 2, F1 = F2 = 1, <E^2> = 3/2 in the
  // ground gauge, so 1/F1 + 1/F2 = 2 < 2/F + 2/<E^2> = 7/3.
  const Split s = qubit_pair();
  CVector plus(2);
  plus << 1.0, 1.0;
  plus.normalize();
  const CVector psi = kron(plus, plus);
  const ClockSystem clock(DensityMatrix::pure(psi), s.total);
  const CopyBoundReport r = copy_bound_check(clock, identity_channel(4), s.h1, s.h2);
  EXPECT_NEAR(r.f_in, 2.0, 1e-12);
  EXPECT_NEAR(r.f1, 1.0, 1e-12);
  EXPECT_NEAR(r.f2, 1.0, 1e-12);
  EXPECT_NEAR(r.e2, 1.5, 1e-12);
  EXPECT_NEAR(r.lhs, 2.0, 1e-12);
  EXPECT_NEAR(r.rhs, 7.0 / 3.0, 1e-12);
  EXPECT_FALSE(r.satisfied);
}

TEST(CopyBound, GroundGaugeMakesShiftsIrrelevant) {
  const Split s = qubit_pair();
  const ClockSystem clock = equal_superposition_clock(3, 1.0);
  const QuantumChannel g = covariant_twirl(random_channel(3, 4, 2, 3), clock.hamiltonian(), s.total);
  const CopyBoundReport base = copy_bound_check(clock, g, s.h1, s.h2);
  const double c = 5.0;
  const ClockSystem shifted_clock(clock.state(), clock.hamiltonian().shifted(c));
  const CopyBoundReport moved = copy_bound_check(shifted_clock, g, s.h1.shifted(c), s.h2);
  EXPECT_NEAR(moved.e2, base.e2, 1e-10);
  EXPECT_NEAR(moved.rhs, base.rhs, 1e-10);
  EXPECT_NEAR(moved.margin, base.margin, 1e-10);
  EXPECT_GT(std::abs(moved.e2_unshifted - base.e2_unshifted), 1.0);
}

TEST(CopyBound, RejectsNonCovariantAndMismatchedChannels) {
  const Split s = qubit_pair();
  const ClockSystem clock = equal_superposition_clock(3, 1.0);
  try {
    (void)copy_bound_check(clock, random_channel(3, 4, 2, 1), s.h1, s.h2);
    FAIL() << "expected precondition error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::precondition);
  }
  try {
    (void)copy_bound_check(clock, random_channel(3, 2, 2, 1), s.h1, s.h2);
    FAIL() << "expected dimension error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
  const QuantumChannel g = covariant_twirl(random_channel(3, 4, 2, 3), clock.hamiltonian(), s.total);
  try {
    (void)copy_bound_check(clock, QuantumChannel(3, 4, 1.2 * g.choi()), s.h1, s.h2);
    FAIL() << "expected precondition error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::precondition);
  }
}

TEST(TimeUncertainty, AlgebraicRestatement) {
  CopyBoundReport r;
  r.f_in = 4.0;
  r.f1 = 2.0;
  r.f2 = 2.0;
  r.e2 = 10.0;
  r.lhs = 1.0;
  r.rhs = 0.5 + 0.2;
  r.margin = r.lhs - r.rhs;
  r.satisfied = true;
  const TimeUncertaintyReport t = time_uncertainty_check(r);
  EXPECT_DOUBLE_EQ(t.dt_in, 0.5);
  EXPECT_NEAR(t.dt1, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(t.dt2, std::sqrt(0.5), 1e-15);
  EXPECT_TRUE(t.satisfied);
  EXPECT_TRUE(t.consistent);
  EXPECT_TRUE(t.symmetric);
  EXPECT_NEAR(t.symmetric_rhs, 0.25 + 0.1, 1e-15);
  EXPECT_TRUE(t.symmetric_satisfied);
}

TEST(TimeUncertainty, AgreesWithCopyBoundOnSamples) {
  const Split s = qubit_pair();
  const ClockSystem clock = equal_superposition_clock(4, 1.0);
  for (Seed seed = 0; seed < 20; ++seed) {
    const QuantumChannel g = covariant_twirl(random_channel(4, 4, 2, seed), clock.hamiltonian(), s.total);
    const CopyBoundReport r = copy_bound_check(clock, g, s.h1, s.h2);
    const TimeUncertaintyReport t = time_uncertainty_check(r);
    EXPECT_TRUE(t.consistent) << "seed " << seed;
    EXPECT_NEAR(t.lhs, r.lhs, 1e-10 * std::max(1.0, r.lhs));
  }
}

TEST(TimeUncertainty, VanishingOutputInformationIsUnbounded) {
  CopyBoundReport r;
  r.f_in = 4.0;
  r.f1 = 2.0;
  r.f2 = 0.0;
  r.e2 = 1.0;
  r.satisfied = true;
  const TimeUncertaintyReport t = time_uncertainty_check(r);
  EXPECT_TRUE(std::isinf(t.dt2));
  EXPECT_TRUE(t.satisfied);
  EXPECT_FALSE(t.symmetric);
}

TEST(Monotonicity, UnitaryOrbitKeepsInformation) {
  const ClockSystem clock(random_density(3, 2, 5), random_hamiltonian(3, 6));
  const MonotonicityReport r =
      monotonicity_check(clock, unitary_channel(clock.hamiltonian().propagator(0.8)), clock.hamiltonian());
  EXPECT_NEAR(r.f_out, r.f_in, 1e-10 * std::max(1.0, r.f_in));
  EXPECT_TRUE(r.holds);
}

TEST(Monotonicity, DepolarizingDestroysInformation) {
  const ClockSystem clock(random_density(3, 1, 2), random_hamiltonian(3, 3));
  const MonotonicityReport r = monotonicity_check(clock, depolarizing_channel(3, 2), Hamiltonian::ladder(2));
  EXPECT_EQ(r.f_out, 0.0);
  EXPECT_TRUE(r.holds);
}

TEST(Monotonicity, RandomCovariantChannels) {
  for (Seed seed = 0; seed < 100; ++seed) {
    const ClockSystem clock(random_density(3, 1 + static_cast<Index>(seed % 3), seed),
                            random_hamiltonian_with_spectrum(std::vector<double>{0.0, 1.0, 2.0}, seed + 1000));
    const Hamiltonian h_out = random_hamiltonian_with_spectrum(std::vector<double>{0.0, 1.0, 2.0}, seed + 2000);
    const QuantumChannel g = covariant_twirl(random_channel(3, 3, 1 + static_cast<Index>(seed % 3), seed), clock.hamiltonian(), h_out);
    EXPECT_TRUE(monotonicity_check(clock, g, h_out).holds) << "seed " << seed;
  }
}

TEST(Monotonicity, ChainsAreTransitive) {
  const ClockSystem clock(random_density(3, 2, 7), Hamiltonian::ladder(3));
  const Hamiltonian mid = Hamiltonian::ladder(4);
  const Hamiltonian out = Hamiltonian::ladder(2);
  const QuantumChannel a = covariant_twirl(random_channel(3, 4, 2, 1), clock.hamiltonian(), mid);
  const QuantumChannel b = covariant_twirl(random_channel(4, 2, 3, 2), mid, out);
  const MonotonicityReport first = monotonicity_check(clock, a, mid);
  const MonotonicityReport second = monotonicity_check(ClockSystem(apply(a, clock.state()), mid), b, out);
  const MonotonicityReport both = monotonicity_check(clock, compose(a, b), out);
  EXPECT_TRUE(first.holds && second.holds && both.holds);
  EXPECT_NEAR(both.f_out, second.f_out, 1e-10);
  EXPECT_LE(both.f_out, first.f_out + 1e-8);
}

TEST(Monotonicity, RejectsNonCovariantChannel) {
  const ClockSystem clock(random_density(3, 2, 7), Hamiltonian::ladder(3));
  try {
    (void)monotonicity_check(clock, random_channel(3, 3, 2, 4), Hamiltonian::ladder(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::precondition);
  }
}

SweepConfig small_copy_config() {
  SweepConfig c;
  c.experiment = Experiment::copy_bound;
  c.clock = ClockKind::random;
  c.dims_in = {2, 3};
  c.kraus_ranks = {1, 2};
  c.samples = 12;
  c.seed = 1;
  c.energy_scales = {1.0, 2.0, 4.0, 8.0};
  return c;
}

TEST(Sweep, DeterministicAndThreadIndependent) {
  SweepConfig c = small_copy_config();
  const std::string once = to_csv(run_sweep(c));
  EXPECT_EQ(once, to_csv(run_sweep(c)));
  c.threads = 3;
  EXPECT_EQ(once, to_csv(run_sweep(c)));
  c.seed = 2;
  EXPECT_NE(once, to_csv(run_sweep(c)));
}

TEST(Sweep, RhsFallsWithEnergyScale) {
  const SweepResult r = run_sweep(small_copy_config());
  ASSERT_EQ(r.rows.size(), 12u * 4u);
  for (std::size_t k = 0; k + 1 < r.rows.size(); ++k) {
    if (r.rows[k].sample_id != r.rows[k + 1].sample_id) continue;
    EXPECT_GT(r.rows[k].rhs, r.rows[k + 1].rhs);
  }
  EXPECT_TRUE(r.all_satisfied);
  EXPECT_GE(r.min_margin, -1e-8);
}

TEST(Sweep, MonotonicityRun) {
  SweepConfig c;
  c.experiment = Experiment::monotonicity;
  c.dims_in = {3};
  c.dim_out1 = 3;
  c.dim_out2 = 1;
  c.kraus_ranks = {1, 2, 3};
  c.samples = 100;
  c.seed = 4;
  const SweepResult r = run_sweep(c);
  EXPECT_EQ(r.rows.size(), 100u);
  EXPECT_GE(r.min_margin, -1e-8);
}

TEST(Sweep, CsvLayout) {
  SweepConfig c = small_copy_config();
  c.samples = 2;
  c.energy_scales = {1.0};
  const std::string csv = to_csv(run_sweep(c));
  EXPECT_EQ(csv.rfind(std::string(kSweepCsvHeader) + "\n", 0), 0u);
  EXPECT_NE(csv.find("\nsummary,"), std::string::npos);
}

TEST(SweepConfig, ErrorsNameTheField) {
  auto field_of = [](const io::Json& j) {
    try {
      (void)sweep_config_from_json(j);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::config);
      return e.detail();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(field_of(io::Json{{"experiment", "copy_bound"}, {"bogus", 1}}), "bogus");
  EXPECT_EQ(field_of(io::Json{{"experiment", "copy_bound"}, {"samples", 0}}), "samples");
  EXPECT_EQ(field_of(io::Json{{"experiment", "nope"}}), "experiment");
  EXPECT_EQ(field_of(io::Json::object()), "experiment");
  EXPECT_EQ(field_of(io::Json{{"experiment", "copy_bound"}, {"energy_scales", {1.0, -2.0}}}), "energy_scales");
  EXPECT_EQ(field_of(io::Json{{"experiment", "copy_bound"}, {"dim_in", 9}, {"kraus_ranks", {1}}}), "kraus_ranks");
}

TEST(SweepConfig, SeedOverrideWins) {
  const SweepConfig c = sweep_config_from_json(io::Json{{"experiment", "monotonicity"}, {"seed", 3}, {"dim_out", 2}}, 17);
  EXPECT_EQ(c.seed, 17u);
  EXPECT_EQ(c.dim_out1, 2);
}

}  // namespace
}  // namespace qclock
