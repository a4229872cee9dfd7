#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "qclock/linalg.hpp"
#include "qclock/qstate.hpp"

namespace qclock {

namespace detail {

/// Real basis of the Hermitian d x d matrices: E_kk, E_kl + E_lk, i(E_kl - E_lk).
[[nodiscard]] inline std::vector<CMatrix> hermitian_basis(Index d) {
  std::vector<CMatrix> basis;
  basis.reserve(static_cast<std::size_t>(d * d));
  for (Index k = 0; k < d; ++k) {
    CMatrix m = CMatrix::Zero(d, d);
    m(k, k) = 1.0;
    basis.push_back(std::move(m));
  }
  for (Index k = 0; k < d; ++k) {
    for (Index l = k + 1; l < d; ++l) {
      CMatrix re = CMatrix::Zero(d, d);
      re(k, l) = re(l, k) = 1.0;
      basis.push_back(std::move(re));
      CMatrix im = CMatrix::Zero(d, d);
      im(k, l) = kI;
      im(l, k) = -kI;
      basis.push_back(std::move(im));
    }
  }
  return basis;
}

/// Independent real coordinates of an anti-Hermitian matrix (d^2 of them).
inline void write_antihermitian(const CMatrix& k, RMatrix& out, Index row0, Index col) {
  const Index d = k.rows();
  Index r = row0;
  for (Index i = 0; i < d; ++i) out(r++, col) = k(i, i).imag();
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j) {
      out(r++, col) = k(i, j).real();
      out(r++, col) = k(i, j).imag();
    }
}

}  // namespace detail

/// Basis (real span) of the Hermitian X with [X, rho] = 0 for every given
/// matrix, from the null space of the stacked commutator maps. Singular values
/// below 1e-10 of the largest count as zero.
[[nodiscard]] inline std::vector<CMatrix> hermitian_commutant(const std::vector<CMatrix>& mats) {
  if (mats.empty()) throw Error(ErrorCode::domain, "commutant needs at least one matrix");
  const Index d = mats.front().rows();
  const auto basis = detail::hermitian_basis(d);
  const Index nb = static_cast<Index>(basis.size());
  RMatrix m(static_cast<Index>(mats.size()) * d * d, nb);
  for (Index c = 0; c < nb; ++c) {
    for (std::size_t s = 0; s < mats.size(); ++s) {
      detail::write_antihermitian(commutator(basis[static_cast<std::size_t>(c)], mats[s]), m,
                                  static_cast<Index>(s) * d * d, c);
    }
  }
  const Eigen::BDCSVD<RMatrix> svd(m, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const double top = sv.size() > 0 ? sv(0) : 0.0;
  std::vector<CMatrix> null_basis;
  for (Index k = 0; k < nb; ++k) {
    const double value = k < sv.size() ? sv(k) : 0.0;
    if (top == 0.0 || value <= 1e-10 * top) {
      CMatrix x = CMatrix::Zero(d, d);
      for (Index c = 0; c < nb; ++c) x += svd.matrixV()(c, k) * basis[static_cast<std::size_t>(c)];
      null_basis.push_back(std::move(x));
    }
  }
  return null_basis;
}

struct DecompositionReport {
  std::vector<CMatrix> subspaces;  // orthonormal columns spanning each block
  std::vector<double> traces_a;
  std::vector<double> traces_b;
  bool distinguishable = false;
  std::optional<std::size_t> witness_index;
  Index commutant_dim = 0;
  int attempts = 0;

  [[nodiscard]] CMatrix projector(std::size_t j) const { return subspaces.at(j) * subspaces.at(j).adjoint(); }
};

namespace detail {

[[nodiscard]] inline double invariance_defect(const CMatrix& rho, const CMatrix& basis) {
  const CMatrix p = basis * basis.adjoint();
  const CMatrix q = CMatrix::Identity(rho.rows(), rho.cols()) - p;
  return max_abs(q * rho * p);
}

}  // namespace detail

/// Finest splitting of the Hilbert space into subspaces invariant under both
/// states. A seeded random Hermitian element of the commutant is drawn and its
/// eigenspaces are taken as the blocks (eigenvalues closer than 1e-7 of the
/// spectral range are merged; a commutant of multiples of the identity has
/// zero range, so the range is floored at 1e-3 of the largest magnitude).
/// Each block is certified invariant to `tol`; up to five fresh draws are
/// made before giving up.
[[nodiscard]] inline DecompositionReport common_invariant_decomposition(const DensityMatrix& rho1,
                                                                        const DensityMatrix& rho2,
                                                                        double tol = 1e-9, Seed seed = 0) {
  if (rho1.dim() != rho2.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "states must have equal dimensions");
  }
  const Index d = rho1.dim();
  const auto commutant = hermitian_commutant({rho1.matrix(), rho2.matrix()});
  GaussianSource source(seed);
  constexpr int kMaxAttempts = 6;
  double last_defect = 0.0;
  for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    CMatrix x = CMatrix::Zero(d, d);
    for (const CMatrix& b : commutant) x += source.real() * b;
    x = 0.5 * (x + x.adjoint());
    const Spectrum s = hermitian_eigen(x);
    const double range = std::max(s.values(d - 1) - s.values(0), 1e-3 * s.values.cwiseAbs().maxCoeff());
    DecompositionReport report;
    report.commutant_dim = static_cast<Index>(commutant.size());
    report.attempts = attempt;
    last_defect = 0.0;
    for (auto [begin, end] : group_sorted_values(s.values, 1e-7 * range)) {
      CMatrix block = s.vectors.middleCols(begin, end - begin);
      last_defect = std::max({last_defect, detail::invariance_defect(rho1.matrix(), block),
                              detail::invariance_defect(rho2.matrix(), block)});
      report.subspaces.push_back(std::move(block));
    }
    if (last_defect > tol) continue;
    double best_gap = 0.0;
    for (std::size_t j = 0; j < report.subspaces.size(); ++j) {
      const CMatrix& b = report.subspaces[j];
      report.traces_a.push_back(real_trace(b.adjoint() * rho1.matrix() * b));
      report.traces_b.push_back(real_trace(b.adjoint() * rho2.matrix() * b));
      const double gap = std::abs(report.traces_a.back() - report.traces_b.back());
      if (gap > tol && gap > best_gap) {
        best_gap = gap;
        report.witness_index = j;
      }
    }
    report.distinguishable = report.witness_index.has_value();
    return report;
  }
  throw Error(ErrorCode::numerical_degeneracy, "could not certify a common invariant decomposition",
              "attempts=" + std::to_string(kMaxAttempts) + " invariance_defect=" + std::to_string(last_defect) +
                  " commutant_dim=" + std::to_string(commutant.size()));
}

struct NondisturbingResult {
  bool distinguishable = false;
  std::optional<CMatrix> witness_projector;
  DecompositionReport decomposition;
};

/// Whether rho1 and rho2 can be told apart by a measurement that disturbs
/// neither; the witness is the projector onto a block with unequal traces.
[[nodiscard]] inline NondisturbingResult nondisturbing_distinguishable(const DensityMatrix& rho1,
                                                                       const DensityMatrix& rho2,
                                                                       double tol = 1e-9, Seed seed = 0) {
  NondisturbingResult out;
  out.decomposition = common_invariant_decomposition(rho1, rho2, tol, seed);
  out.distinguishable = out.decomposition.distinguishable;
  if (out.distinguishable) out.witness_projector = out.decomposition.projector(*out.decomposition.witness_index);
  return out;
}

struct BlockTraceReport {
  std::vector<CMatrix> projectors;   // spectral projectors of H
  std::vector<double> block_traces;  // tr(P_k rho) at the first time
  double max_deviation = 0.0;
  bool conserved = false;
};

/// tr(P_k rho_t) for the spectral projectors P_k of H (eigenvalues grouped
/// within `tol`) across the given times.
[[nodiscard]] inline BlockTraceReport conserved_block_traces(const ClockSystem& clock,
                                                             const std::vector<double>& times,
                                                             double tol = 1e-9) {
  if (times.empty()) throw Error(ErrorCode::domain, "at least one time is required");
  const Hamiltonian& h = clock.hamiltonian();
  BlockTraceReport report;
  for (auto [begin, end] : group_sorted_values(h.eigenvalues(), tol)) {
    const CMatrix v = h.eigenvectors().middleCols(begin, end - begin);
    report.projectors.push_back(v * v.adjoint());
  }
  for (std::size_t t = 0; t < times.size(); ++t) {
    const DensityMatrix rho_t = evolve(clock, times[t]);
    for (std::size_t k = 0; k < report.projectors.size(); ++k) {
      const double tr = real_trace_product(report.projectors[k], rho_t.matrix());
      if (t == 0) {
        report.block_traces.push_back(tr);
      } else {
        report.max_deviation = std::max(report.max_deviation, std::abs(tr - report.block_traces[k]));
      }
    }
  }
  report.conserved = report.max_deviation <= 1e-9;
  return report;
}

[[nodiscard]] inline double max_pairwise_commutator(const std::vector<DensityMatrix>& states) {
  double worst = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      if (states[i].dim() != states[j].dim()) {
        throw Error(ErrorCode::dimension_mismatch, "states must have equal dimensions");
      }
      worst = std::max(worst, max_abs(commutator(states[i].matrix(), states[j].matrix())));
    }
  return worst;
}

/// Broadcastability test: every pair of states commutes to `tol`.
[[nodiscard]] inline bool pairwise_commuting(const std::vector<DensityMatrix>& states, double tol = 1e-10) {
  if (states.size() < 2) throw Error(ErrorCode::domain, "pairwise_commuting needs at least two states");
  return max_pairwise_commutator(states) <= tol;
}

/// Times 2 pi k / (n E), k = 0..n-1, at which the equal-superposition clock
/// with levels E, 2E, ..., nE passes through mutually orthogonal states.
[[nodiscard]] inline std::vector<double> orthogonal_times(Index n, double energy_quantum) {
  if (n < 2) throw Error(ErrorCode::domain, "orthogonal_times needs n >= 2");
  if (!(energy_quantum > 0.0)) throw Error(ErrorCode::domain, "energy quantum must be positive");
  std::vector<double> times(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    times[static_cast<std::size_t>(k)] =
        2.0 * std::numbers::pi * static_cast<double>(k) / (static_cast<double>(n) * energy_quantum);
  }
  return times;
}

/// max_{k != l} |<psi_{t_k} | psi_{t_l}>| for a pure state vector evolved under H.
[[nodiscard]] inline double max_pairwise_overlap(const CVector& psi, const Hamiltonian& h,
                                                 const std::vector<double>& times) {
  std::vector<CVector> states;
  for (double t : times) states.push_back(evolve_vector(psi, h, t));
  double worst = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k)
    for (std::size_t l = k + 1; l < states.size(); ++l) worst = std::max(worst, std::abs(states[k].dot(states[l])));
  return worst;
}

}  // namespace qclock
