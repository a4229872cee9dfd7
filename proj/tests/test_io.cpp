#include <gtest/gtest.h>

#include "qclock/io.hpp"

namespace qclock {
namespace {

using io::Json;

TEST(Io, MatrixRoundTripIsExact) {
  for (Seed seed = 0; seed < 10; ++seed) {
    const CMatrix m = random_hamiltonian(1 + static_cast<Index>(seed % 5), seed).matrix();
    const Json j = Json::parse(io::to_json(m).dump());
    EXPECT_EQ(max_abs(io::matrix_from_json(j) - m), 0.0);
  }
}

TEST(Io, ImaginaryPartIsOptional) {
  const CMatrix m = io::matrix_from_json(Json::parse(R"({"dim": 2, "re": [[1, 2], [3, 4]]})"));
  EXPECT_EQ(m(1, 0), Complex(3.0, 0.0));
}

TEST(Io, MalformedMatricesAreRejected) {
  EXPECT_THROW((void)io::matrix_from_json(Json::parse(R"({"dim": 2, "re": [[1, 2]]})")), Error);
  EXPECT_THROW((void)io::matrix_from_json(Json::parse(R"({"dim": 2, "re": [[1, 2], [3]]})")), Error);
  EXPECT_THROW((void)io::matrix_from_json(Json::parse(R"({"re": [[1]]})")), Error);
  EXPECT_THROW((void)io::matrix_from_json(Json::parse(R"({"dim": 0, "re": []})")), Error);
}

TEST(Io, ClockAndChannelRoundTrip) {
  const ClockSystem clock(random_density(3, 2, 1), random_hamiltonian(3, 2));
  const ClockSystem back = io::clock_from_json(Json::parse(io::to_json(clock).dump()));
  EXPECT_EQ(max_abs(back.state().matrix() - clock.state().matrix()), 0.0);
  EXPECT_EQ(max_abs(back.hamiltonian().matrix() - clock.hamiltonian().matrix()), 0.0);

  const QuantumChannel g = random_channel(2, 3, 2, 5);
  const QuantumChannel g2 = io::channel_from_json(Json::parse(io::to_json(g).dump()));
  EXPECT_EQ(g2.dim_in(), 2);
  EXPECT_EQ(g2.dim_out(), 3);
  EXPECT_EQ(max_abs(g2.choi() - g.choi()), 0.0);
}

TEST(Io, ReportsCarryTheirFields) {
  CVector psi(2);
  psi << 1.0, 1.0;
  const ClockSystem clock(DensityMatrix::pure(psi), Hamiltonian::ladder(2));
  const Json q = io::to_json(qfi(clock));
  EXPECT_NEAR(q.at("fisher_info").get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(q.at("time_uncertainty").get<double>(), 1.0, 1e-12);
  EXPECT_EQ(q.at("kernel_dim").get<int>(), 1);
  EXPECT_EQ(io::matrix_from_json(q.at("sld")).rows(), 2);

  const Json m = io::to_json(energy_moments(clock));
  EXPECT_NEAR(m.at("mean").get<double>(), 0.5, 1e-15);

  const ClockSystem still(DensityMatrix::maximally_mixed(2), Hamiltonian::ladder(2));
  EXPECT_EQ(io::to_json(qfi(still)).at("time_uncertainty").get<std::string>(), "inf");
}

TEST(Io, NonFiniteNumbersRoundTripAsStrings) {
  EXPECT_EQ(io::number(std::numeric_limits<double>::infinity()), Json("inf"));
  EXPECT_EQ(io::read_number(Json("-inf"), "x"), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(io::read_number(Json(2.5), "x"), 2.5);
  EXPECT_THROW((void)io::read_number(Json("two"), "x"), Error);
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Io, DecompositionDocument) {
  RVector a(2), b(2);
  a << 0.5, 0.5;
  b << 0.7, 0.3;
  const DecompositionReport r = common_invariant_decomposition(DensityMatrix::from_matrix(a.cast<Complex>().asDiagonal()),
                                                               DensityMatrix::from_matrix(b.cast<Complex>().asDiagonal()));
  const Json j = io::to_json(r);
  ASSERT_EQ(j.at("subspaces").size(), 2u);
  EXPECT_TRUE(j.at("distinguishable").get<bool>());
  EXPECT_FALSE(j.at("witness_index").is_null());
  const CMatrix p = io::matrix_from_json(j.at("subspaces").at(0).at("projector"));
  EXPECT_LE(max_abs(p * p - p), 1e-12);
}

TEST(Io, SignalFamilies) {
  const auto g = io::family_from_json(Json::parse(
      R"({"family": "gaussian_delay", "params": {"delay_std": 0.5}, "grid": {"min": -5, "max": 5, "points": 1001}})"));
  EXPECT_NEAR(classical_fisher(g, 0.0), 4.0, 0.04);
  const auto t = io::family_from_json(Json::parse(
      R"({"family": "tabulated", "params": {"sample_points": [0, 1], "times": [0, 1], "probabilities": [[1, 0], [0.5, 0.5]]}})"));
  EXPECT_EQ(t.sample_points().size(), 2u);
  EXPECT_THROW((void)io::family_from_json(Json::parse(R"({"family": "square"})")), Error);
  EXPECT_THROW((void)io::family_from_json(Json::parse(R"({"family": "gaussian_delay", "params": {"delay_std": 1}})")),
               Error);
}

}  // namespace
}  // namespace qclock
