#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qclock/error.hpp"

namespace qclock {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;
using Seed = std::uint64_t;

inline constexpr Complex kI{0.0, 1.0};

[[nodiscard]] inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

[[nodiscard]] inline double hermiticity_defect(const CMatrix& m) {
  return max_abs(m - m.adjoint());
}

[[nodiscard]] inline CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  return a * b - b * a;
}

/// Kronecker product with the first factor's index varying slowest.
[[nodiscard]] inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

[[nodiscard]] inline double real_trace(const CMatrix& m) { return m.trace().real(); }

/// Re tr(a b) without forming the product.
[[nodiscard]] inline double real_trace_product(const CMatrix& a, const CMatrix& b) {
  return (a.transpose().cwiseProduct(b)).sum().real();
}

inline void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + " must be a non-empty square matrix",
                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

/// Symmetrizes `m` when its Hermiticity defect is within `tol`; rejects it otherwise.
[[nodiscard]] inline CMatrix hermitize(const CMatrix& m, double tol, const char* what) {
  require_square(m, what);
  const double defect = hermiticity_defect(m);
  if (!(defect <= tol)) {
    throw Error(ErrorCode::validation, std::string(what) + " is not Hermitian",
                "hermiticity_defect=" + std::to_string(defect));
  }
  CMatrix sym = 0.5 * (m + m.adjoint());
  for (Index k = 0; k < sym.rows(); ++k) sym(k, k) = Complex(sym(k, k).real(), 0.0);
  return sym;
}

struct Spectrum {
  RVector values;   // ascending
  CMatrix vectors;  // columns
};

[[nodiscard]] inline Spectrum hermitian_eigen(const CMatrix& m) {
  const Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::numerical_degeneracy, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Half-open index ranges of consecutive ascending eigenvalues; a new group
/// starts wherever the gap to the previous value exceeds `gap`.
[[nodiscard]] inline std::vector<std::pair<Index, Index>> group_sorted_values(const RVector& values,
                                                                              double gap) {
  std::vector<std::pair<Index, Index>> groups;
  const Index n = values.size();
  Index begin = 0;
  for (Index k = 1; k <= n; ++k) {
    if (k == n || values(k) - values(k - 1) > gap) {
      groups.emplace_back(begin, k);
      begin = k;
    }
  }
  return groups;
}

/// Seeded standard normal source. Draws are consumed in a fixed order so a
/// seed reproduces every matrix bit for bit on a given toolchain.
class GaussianSource {
 public:
  explicit GaussianSource(Seed seed) : engine_(seed) {}

  double real() { return normal_(engine_); }
  Complex complex() {
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {re, im};
  }

  CMatrix complex_matrix(Index rows, Index cols) {
    CMatrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = complex();
    return m;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// splitmix64 step; decorrelates sub-streams that share a base seed.
[[nodiscard]] constexpr Seed derive_seed(Seed base, Seed stream) noexcept {
  Seed z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Orthonormal columns from a Householder QR with phases fixed so that R has a
/// positive real diagonal.
[[nodiscard]] inline CMatrix orthonormal_columns(const CMatrix& g) {
  const Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(g.rows(), g.cols());
  const CMatrix r = qr.matrixQR();
  for (Index j = 0; j < g.cols(); ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

}  // namespace qclock
