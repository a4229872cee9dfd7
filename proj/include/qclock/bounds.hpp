#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "qclock/channels.hpp"
#include "qclock/fisher.hpp"
#include "qclock/qstate.hpp"

namespace qclock {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Fisher values at or below this are treated as zero; their reciprocals are infinite.
inline constexpr double kFisherFloor = 1e-12;

struct BoundTolerances {
  double covariance = 1e-8;
  double cptp = 1e-9;
  double margin = 1e-8;
};

/// H1 (x) 1 + 1 (x) H2 on the output pair, first factor slow.
[[nodiscard]] inline Hamiltonian total_hamiltonian(const Hamiltonian& h1, const Hamiltonian& h2) {
  const CMatrix i1 = CMatrix::Identity(h1.dim(), h1.dim());
  const CMatrix i2 = CMatrix::Identity(h2.dim(), h2.dim());
  return Hamiltonian(kron(h1.matrix(), i2) + kron(i1, h2.matrix()));
}

/// Energy zero for copy-bound reports: the total output Hamiltonian is shifted
/// so that its lowest eigenvalue is 0 before <E^2> is taken.
inline constexpr const char* kEnergyGauge = "ground_energy_zero";

struct CopyBoundReport {
  double f_in = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  double e2 = 0.0;            // <E^2> in the ground-energy gauge
  double e2_unshifted = 0.0;  // <E^2> with the Hamiltonians as given
  double lhs = 0.0;           // 1/f1 + 1/f2
  double rhs = 0.0;           // 2/f_in + 2/e2
  double margin = 0.0;        // lhs - rhs
  bool satisfied = false;
  double covariance_residual = 0.0;
  Index dim_in = 0;
  Index dim_out1 = 0;
  Index dim_out2 = 0;
};

[[nodiscard]] inline double safe_reciprocal(double value) {
  return value <= kFisherFloor ? kInfinity : 1.0 / value;
}

/// Copy inequality 1/F1 + 1/F2 >= 2/F + 2/<E^2> for a clock split by a
/// covariant broadcast into two output systems with Hamiltonians h1, h2.
/// The broadcast must be CPTP and covariant for (H, H1 (x) 1 + 1 (x) H2); a
/// non-covariant device is rejected (twirl it first).
[[nodiscard]] inline CopyBoundReport copy_bound_check(const ClockSystem& clock, const QuantumChannel& broadcast,
                                                      const Hamiltonian& h1, const Hamiltonian& h2,
                                                      const BoundTolerances& tol = {}) {
  if (broadcast.dim_in() != clock.dim() || broadcast.dim_out() != h1.dim() * h2.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "broadcast dimensions do not match clock and output Hamiltonians",
                "dim_in=" + std::to_string(broadcast.dim_in()) + " dim_out=" + std::to_string(broadcast.dim_out()));
  }
  const CptpReport cptp = validate_cptp(broadcast, tol.cptp);
  if (!cptp.ok) {
    throw Error(ErrorCode::precondition, "broadcast channel is not CPTP",
                "cp_violation=" + std::to_string(cptp.cp_violation) +
                    " tp_violation=" + std::to_string(cptp.tp_violation));
  }
  const Hamiltonian h_total = total_hamiltonian(h1, h2);
  const CovarianceReport cov = is_covariant(broadcast, clock.hamiltonian(), h_total, tol.covariance);
  if (!cov.is_covariant) {
    throw Error(ErrorCode::precondition,
                "broadcast channel is not covariant; apply covariant_twirl before checking the copy bound",
                "covariance_residual=" + std::to_string(cov.residual));
  }

  const DensityMatrix out = apply(broadcast, clock.state());
  const DensityMatrix out1 = partial_trace(out, h1.dim(), h2.dim(), 1);
  const DensityMatrix out2 = partial_trace(out, h1.dim(), h2.dim(), 2);

  CopyBoundReport r;
  r.dim_in = clock.dim();
  r.dim_out1 = h1.dim();
  r.dim_out2 = h2.dim();
  r.covariance_residual = cov.residual;
  r.f_in = qfi(clock).fisher_info;
  r.f1 = qfi(ClockSystem(out1, h1)).fisher_info;
  r.f2 = qfi(ClockSystem(out2, h2)).fisher_info;

  const CMatrix& ht = h_total.matrix();
  const CMatrix shifted = ht - h_total.ground_energy() * CMatrix::Identity(ht.rows(), ht.cols());
  r.e2 = std::max(0.0, real_trace_product(out.matrix(), shifted * shifted));
  r.e2_unshifted = std::max(0.0, real_trace_product(out.matrix(), ht * ht));

  r.lhs = safe_reciprocal(r.f1) + safe_reciprocal(r.f2);
  r.rhs = 2.0 * safe_reciprocal(r.f_in) + 2.0 * safe_reciprocal(r.e2);
  if (std::isinf(r.lhs)) {
    r.margin = kInfinity;
    r.satisfied = true;
  } else if (std::isinf(r.rhs)) {
    r.margin = -kInfinity;
    r.satisfied = false;
  } else {
    r.margin = r.lhs - r.rhs;
    r.satisfied = r.margin >= -tol.margin;
  }
  return r;
}

struct TimeUncertaintyReport {
  double dt_in = 0.0;
  double dt1 = 0.0;
  double dt2 = 0.0;
  double lhs = 0.0;  // dt1^2 + dt2^2
  double rhs = 0.0;  // 2 dt_in^2 + 2/<E^2>
  bool satisfied = false;
  bool symmetric = false;           // f1 == f2 to 1e-9 relative
  double symmetric_rhs = 0.0;       // dt_in^2 + 1/<E^2>
  bool symmetric_satisfied = false;
  bool consistent = false;          // verdict agrees with the copy-bound report
};

/// The copy inequality restated for timing uncertainties dt = 1/sqrt(F).
/// An unbounded output uncertainty satisfies it trivially; an unbounded input
/// uncertainty with bounded outputs does not.
[[nodiscard]] inline TimeUncertaintyReport time_uncertainty_check(const CopyBoundReport& report,
                                                                  double margin_tol = 1e-8) {
  auto dt = [](double f) { return f <= kFisherFloor ? kInfinity : 1.0 / std::sqrt(f); };
  TimeUncertaintyReport t;
  t.dt_in = dt(report.f_in);
  t.dt1 = dt(report.f1);
  t.dt2 = dt(report.f2);
  const double inv_e2 = safe_reciprocal(report.e2);
  t.lhs = t.dt1 * t.dt1 + t.dt2 * t.dt2;
  t.rhs = 2.0 * t.dt_in * t.dt_in + 2.0 * inv_e2;
  t.symmetric_rhs = t.dt_in * t.dt_in + inv_e2;
  if (std::isinf(t.lhs)) {
    t.satisfied = true;
  } else if (std::isinf(t.rhs)) {
    t.satisfied = false;
  } else {
    t.satisfied = t.lhs - t.rhs >= -margin_tol;
  }
  t.symmetric = std::isfinite(t.lhs) &&
                std::abs(report.f1 - report.f2) <= 1e-9 * std::max(report.f1, report.f2);
  if (t.symmetric) {
    t.symmetric_satisfied = std::isinf(t.symmetric_rhs) ? false : t.dt1 * t.dt1 - t.symmetric_rhs >= -0.5 * margin_tol;
  }
  t.consistent = t.satisfied == report.satisfied;
  return t;
}

struct MonotonicityReport {
  double f_in = 0.0;
  double f_out = 0.0;
  double covariance_residual = 0.0;
  bool holds = false;
};

/// F of the output clock (G(rho), H_out) compared with F of the input clock
/// for a covariant channel G.
[[nodiscard]] inline MonotonicityReport monotonicity_check(const ClockSystem& clock, const QuantumChannel& channel,
                                                           const Hamiltonian& h_out, const BoundTolerances& tol = {}) {
  if (channel.dim_in() != clock.dim() || channel.dim_out() != h_out.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "channel dimensions do not match clock and output Hamiltonian");
  }
  const CovarianceReport cov = is_covariant(channel, clock.hamiltonian(), h_out, tol.covariance);
  if (!cov.is_covariant) {
    throw Error(ErrorCode::precondition, "channel is not covariant; non-covariant channels can increase F",
                "covariance_residual=" + std::to_string(cov.residual));
  }
  MonotonicityReport r;
  r.covariance_residual = cov.residual;
  r.f_in = qfi(clock).fisher_info;
  r.f_out = qfi(ClockSystem(apply(channel, clock.state()), h_out)).fisher_info;
  r.holds = r.f_out <= r.f_in + tol.margin;
  return r;
}

}  // namespace qclock
