#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "qclock/linalg.hpp"
#include "qclock/qstate.hpp"

namespace qclock {

/// Linear map in Choi form.
///
/// Rows and columns of the Choi matrix are indexed by pairs (a, i) with a the
/// output index and i the input index, flattened as i * dim_out + a (output
/// index fast). The entry choi((a,i),(b,j)) equals G(E_ij)(a, b), so
///   G(X)(a, b) = sum_ij choi((a,i),(b,j)) X(i, j).
/// Construction checks shape and Hermiticity only; complete positivity and
/// trace preservation are reported by validate_cptp.
class QuantumChannel {
 public:
  QuantumChannel(Index dim_in, Index dim_out, const CMatrix& choi, double hermitian_tol = 1e-12)
      : dim_in_(dim_in), dim_out_(dim_out) {
    if (dim_in < 1 || dim_out < 1) throw Error(ErrorCode::domain, "channel dimensions must be positive");
    if (choi.rows() != dim_in * dim_out || choi.cols() != dim_in * dim_out) {
      throw Error(ErrorCode::dimension_mismatch, "Choi matrix size must be dim_in * dim_out",
                  std::to_string(choi.rows()) + "x" + std::to_string(choi.cols()));
    }
    choi_ = hermitize(choi, hermitian_tol, "Choi matrix");
  }

  [[nodiscard]] Index dim_in() const noexcept { return dim_in_; }
  [[nodiscard]] Index dim_out() const noexcept { return dim_out_; }
  [[nodiscard]] const CMatrix& choi() const noexcept { return choi_; }

  /// Output block G(E_ij).
  [[nodiscard]] auto block(Index i, Index j) const {
    return choi_.block(i * dim_out_, j * dim_out_, dim_out_, dim_out_);
  }

 private:
  Index dim_in_;
  Index dim_out_;
  CMatrix choi_;
};

/// G applied to an arbitrary (not necessarily Hermitian) dim_in matrix.
[[nodiscard]] inline CMatrix apply_map(const QuantumChannel& g, const CMatrix& x) {
  if (x.rows() != g.dim_in() || x.cols() != g.dim_in()) {
    throw Error(ErrorCode::dimension_mismatch, "input matrix does not match channel input dimension");
  }
  CMatrix out = CMatrix::Zero(g.dim_out(), g.dim_out());
  for (Index i = 0; i < g.dim_in(); ++i)
    for (Index j = 0; j < g.dim_in(); ++j)
      if (x(i, j) != Complex(0.0, 0.0)) out.noalias() += x(i, j) * g.block(i, j);
  return out;
}

[[nodiscard]] inline DensityMatrix apply(const QuantumChannel& g, const DensityMatrix& rho) {
  return DensityMatrix::from_matrix(apply_map(g, rho.matrix()), kDerivedStateTolerances);
}

[[nodiscard]] inline QuantumChannel identity_channel(Index dim) {
  CMatrix choi = CMatrix::Zero(dim * dim, dim * dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) choi(i * dim + i, j * dim + j) = 1.0;
  return QuantumChannel(dim, dim, choi);
}

/// X -> tr(X) I / dim_out.
[[nodiscard]] inline QuantumChannel depolarizing_channel(Index dim_in, Index dim_out) {
  CMatrix choi = CMatrix::Zero(dim_in * dim_out, dim_in * dim_out);
  for (Index i = 0; i < dim_in; ++i)
    for (Index a = 0; a < dim_out; ++a) choi(i * dim_out + a, i * dim_out + a) = 1.0 / static_cast<double>(dim_out);
  return QuantumChannel(dim_in, dim_out, choi);
}

[[nodiscard]] inline QuantumChannel depolarizing_channel(Index dim) { return depolarizing_channel(dim, dim); }

/// X -> sum_m K_m X K_m^dagger; each K_m is dim_out x dim_in.
[[nodiscard]] inline QuantumChannel from_kraus(const std::vector<CMatrix>& kraus) {
  if (kraus.empty()) throw Error(ErrorCode::domain, "at least one Kraus operator is required");
  const Index dout = kraus.front().rows();
  const Index din = kraus.front().cols();
  CMatrix choi = CMatrix::Zero(din * dout, din * dout);
  for (const CMatrix& k : kraus) {
    if (k.rows() != dout || k.cols() != din) {
      throw Error(ErrorCode::dimension_mismatch, "Kraus operators must share one shape");
    }
    // vec with output index fast: v((a,i)) = K(a, i)
    const Eigen::Map<const CVector> v(k.data(), k.size());
    choi.noalias() += v * v.adjoint();
  }
  return QuantumChannel(din, dout, choi);
}

[[nodiscard]] inline QuantumChannel unitary_channel(const CMatrix& u) { return from_kraus({u}); }

/// Kraus operators from the Choi eigendecomposition, dropping eigenvalues <= cutoff.
[[nodiscard]] inline std::vector<CMatrix> to_kraus(const QuantumChannel& g, double cutoff = 1e-12) {
  const Spectrum s = hermitian_eigen(g.choi());
  std::vector<CMatrix> kraus;
  for (Index m = s.values.size() - 1; m >= 0; --m) {
    if (s.values(m) <= cutoff) break;
    const CVector v = std::sqrt(s.values(m)) * s.vectors.col(m);
    kraus.emplace_back(Eigen::Map<const CMatrix>(v.data(), g.dim_out(), g.dim_in()));
  }
  return kraus;
}

struct CovarianceReport {
  double residual = 0.0;
  bool is_covariant = false;
};

/// Largest deviation from G(i[H_in, E_ij]) = i[H_out, G(E_ij)] over all matrix units.
[[nodiscard]] inline CovarianceReport is_covariant(const QuantumChannel& g, const Hamiltonian& h_in,
                                                   const Hamiltonian& h_out, double tol = 1e-9) {
  if (h_in.dim() != g.dim_in() || h_out.dim() != g.dim_out()) {
    throw Error(ErrorCode::dimension_mismatch, "Hamiltonian dimensions do not match the channel");
  }
  double residual = 0.0;
  CMatrix unit = CMatrix::Zero(g.dim_in(), g.dim_in());
  for (Index i = 0; i < g.dim_in(); ++i) {
    for (Index j = 0; j < g.dim_in(); ++j) {
      unit.setZero();
      unit(i, j) = 1.0;
      const CMatrix lhs = apply_map(g, kI * commutator(h_in.matrix(), unit));
      const CMatrix rhs = kI * commutator(h_out.matrix(), g.block(i, j));
      residual = std::max(residual, max_abs(lhs - rhs));
    }
  }
  return {residual, residual <= tol};
}

namespace detail {

/// W = V_in^T (x) V_out^dagger maps the Choi matrix into the tensor eigenbasis.
[[nodiscard]] inline CMatrix eigenbasis_change(const Hamiltonian& h_in, const Hamiltonian& h_out) {
  return kron(h_in.eigenvectors().transpose(), h_out.eigenvectors().adjoint());
}

}  // namespace detail

/// Projection onto covariant maps. With transition frequencies
/// w(a,i) = E_out_a - E_in_i, the Choi entry ((a,i),(b,j)) in the eigenbasis
/// survives iff w(a,i) and w(b,j) fall in the same cluster, clusters being
/// maximal runs of sorted frequencies with consecutive gaps <= freq_tol. The
/// kept pattern is block-of-ones, so complete positivity is preserved (Schur
/// product), and for exactly matched frequencies the result equals the long-
/// time average of exp(iH_out t) G(exp(-iH_in t) . exp(iH_in t)) exp(-iH_out t).
[[nodiscard]] inline QuantumChannel covariant_twirl(const QuantumChannel& g, const Hamiltonian& h_in,
                                                    const Hamiltonian& h_out, double freq_tol = 1e-9) {
  if (h_in.dim() != g.dim_in() || h_out.dim() != g.dim_out()) {
    throw Error(ErrorCode::dimension_mismatch, "Hamiltonian dimensions do not match the channel");
  }
  const Index din = g.dim_in();
  const Index dout = g.dim_out();
  const Index n = din * dout;

  RVector omega(n);
  for (Index i = 0; i < din; ++i)
    for (Index a = 0; a < dout; ++a) omega(i * dout + a) = h_out.eigenvalues()(a) - h_in.eigenvalues()(i);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return omega(x) < omega(y); });
  std::vector<Index> cluster(static_cast<std::size_t>(n), 0);
  Index current = 0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (omega(order[k]) - omega(order[k - 1]) > freq_tol) ++current;
    cluster[static_cast<std::size_t>(order[k])] = current;
  }

  const CMatrix w = detail::eigenbasis_change(h_in, h_out);
  CMatrix c = w * g.choi() * w.adjoint();
  for (Index r = 0; r < n; ++r)
    for (Index s = 0; s < n; ++s)
      if (cluster[static_cast<std::size_t>(r)] != cluster[static_cast<std::size_t>(s)]) c(r, s) = 0.0;
  CMatrix back = w.adjoint() * c * w;
  back = 0.5 * (back + back.adjoint());
  return QuantumChannel(din, dout, back);
}

struct CptpReport {
  double cp_violation = 0.0;
  double tp_violation = 0.0;
  bool ok = false;
};

[[nodiscard]] inline CMatrix output_partial_trace(const QuantumChannel& g) {
  CMatrix tr = CMatrix::Zero(g.dim_in(), g.dim_in());
  for (Index i = 0; i < g.dim_in(); ++i)
    for (Index j = 0; j < g.dim_in(); ++j) tr(i, j) = g.block(i, j).trace();
  return tr;
}

[[nodiscard]] inline CptpReport validate_cptp(const QuantumChannel& g, double tol = 1e-9) {
  CptpReport r;
  r.cp_violation = std::max(0.0, -hermitian_eigen(g.choi()).values.minCoeff());
  r.tp_violation = max_abs(output_partial_trace(g) - CMatrix::Identity(g.dim_in(), g.dim_in()));
  r.ok = r.cp_violation <= tol && r.tp_violation <= tol;
  return r;
}

/// G1 (x) G2, with the first factor's indices slow on both input and output.
[[nodiscard]] inline QuantumChannel tensor(const QuantumChannel& g1, const QuantumChannel& g2) {
  const Index din = g1.dim_in() * g2.dim_in();
  const Index dout = g1.dim_out() * g2.dim_out();
  CMatrix choi(din * dout, din * dout);
  for (Index i1 = 0; i1 < g1.dim_in(); ++i1)
    for (Index i2 = 0; i2 < g2.dim_in(); ++i2)
      for (Index j1 = 0; j1 < g1.dim_in(); ++j1)
        for (Index j2 = 0; j2 < g2.dim_in(); ++j2) {
          const Index i = i1 * g2.dim_in() + i2;
          const Index j = j1 * g2.dim_in() + j2;
          choi.block(i * dout, j * dout, dout, dout) = kron(g1.block(i1, j1), g2.block(i2, j2));
        }
  return QuantumChannel(din, dout, choi);
}

/// `second` after `first`.
[[nodiscard]] inline QuantumChannel compose(const QuantumChannel& first, const QuantumChannel& second) {
  if (first.dim_out() != second.dim_in()) {
    throw Error(ErrorCode::dimension_mismatch, "composed channels have incompatible dimensions");
  }
  const Index din = first.dim_in();
  const Index dout = second.dim_out();
  CMatrix choi(din * dout, din * dout);
  for (Index i = 0; i < din; ++i)
    for (Index j = 0; j < din; ++j)
      choi.block(i * dout, j * dout, dout, dout) = apply_map(second, first.block(i, j));
  return QuantumChannel(din, dout, choi);
}

/// Reduced state on factor `keep` (1 or 2) of a bipartite rho on d1 x d2,
/// first factor slow.
[[nodiscard]] inline DensityMatrix partial_trace(const DensityMatrix& rho, Index d1, Index d2, int keep) {
  if (d1 < 1 || d2 < 1 || d1 * d2 != rho.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "partial trace dimensions do not multiply to the state dimension");
  }
  if (keep != 1 && keep != 2) throw Error(ErrorCode::domain, "keep must be 1 or 2");
  const CMatrix& m = rho.matrix();
  CMatrix out;
  if (keep == 1) {
    out = CMatrix::Zero(d1, d1);
    for (Index a = 0; a < d1; ++a)
      for (Index b = 0; b < d1; ++b) out(a, b) = m.block(a * d2, b * d2, d2, d2).trace();
  } else {
    out = CMatrix::Zero(d2, d2);
    for (Index a = 0; a < d1; ++a) out += m.block(a * d2, a * d2, d2, d2);
  }
  return DensityMatrix::from_matrix(out, kDerivedStateTolerances);
}

/// rho -> rho (x) sigma for inputs of dimension dim_in.
[[nodiscard]] inline QuantumChannel append_state(Index dim_in, const DensityMatrix& sigma) {
  const Index d2 = sigma.dim();
  const Index dout = dim_in * d2;
  CMatrix choi = CMatrix::Zero(dim_in * dout, dim_in * dout);
  for (Index i = 0; i < dim_in; ++i)
    for (Index j = 0; j < dim_in; ++j)
      choi.block(i * dout + i * d2, j * dout + j * d2, d2, d2) = sigma.matrix();
  return QuantumChannel(dim_in, dout, choi);
}

/// Stinespring sampling: a seeded complex Gaussian (dim_out * kraus_rank) x dim_in
/// matrix is orthonormalized to an isometry V whose row blocks are the Kraus operators.
[[nodiscard]] inline QuantumChannel random_channel(Index dim_in, Index dim_out, Index kraus_rank, Seed seed) {
  if (dim_in < 1 || dim_out < 1 || kraus_rank < 1) {
    throw Error(ErrorCode::domain, "random_channel dimensions and Kraus rank must be positive");
  }
  if (kraus_rank * dim_out < dim_in) {
    throw Error(ErrorCode::domain, "kraus_rank * dim_out must be at least dim_in to form an isometry",
                "kraus_rank=" + std::to_string(kraus_rank));
  }
  GaussianSource source(seed);
  const CMatrix v = orthonormal_columns(source.complex_matrix(dim_out * kraus_rank, dim_in));
  std::vector<CMatrix> kraus;
  for (Index m = 0; m < kraus_rank; ++m) kraus.emplace_back(v.middleRows(m * dim_out, dim_out));
  return from_kraus(kraus);
}

}  // namespace qclock
