#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qclock/linalg.hpp"

namespace qclock {

// Units: hbar = 1. Times are measured in inverse energy units.

struct ValidationTolerances {
  double hermitian = 1e-12;
  double psd = 1e-10;
  double trace = 1e-10;
};

/// Tolerances for states produced by channel application or partial traces,
/// which inherit the 1e-9 CPTP slack of the channel that made them.
inline constexpr ValidationTolerances kDerivedStateTolerances{1e-10, 1e-9, 1e-9};

/// Hermitian, positive semidefinite, unit-trace matrix. Immutable.
class DensityMatrix {
 public:
  [[nodiscard]] static DensityMatrix from_matrix(const CMatrix& m,
                                                 const ValidationTolerances& tol = {}) {
    CMatrix rho = hermitize(m, tol.hermitian, "density matrix");
    const double tr = real_trace(rho);
    if (!(std::abs(tr - 1.0) <= tol.trace)) {
      throw Error(ErrorCode::validation, "density matrix does not have unit trace",
                  "trace=" + std::to_string(tr));
    }
    const double min_eig = hermitian_eigen(rho).values.minCoeff();
    if (!(min_eig >= -tol.psd)) {
      throw Error(ErrorCode::validation, "density matrix is not positive semidefinite",
                  "min_eigenvalue=" + std::to_string(min_eig));
    }
    return DensityMatrix(std::move(rho));
  }

  /// |psi><psi| / <psi|psi>.
  [[nodiscard]] static DensityMatrix pure(const CVector& psi) {
    const double norm = psi.norm();
    if (psi.size() == 0 || !(norm > 0.0)) {
      throw Error(ErrorCode::domain, "pure state vector must be non-zero");
    }
    const CVector unit = psi / norm;
    return from_matrix(unit * unit.adjoint());
  }

  [[nodiscard]] static DensityMatrix maximally_mixed(Index dim) {
    if (dim < 1) throw Error(ErrorCode::domain, "dimension must be positive");
    return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  [[nodiscard]] Index dim() const noexcept { return rho_.rows(); }
  [[nodiscard]] const CMatrix& matrix() const noexcept { return rho_; }
  [[nodiscard]] double purity() const { return real_trace_product(rho_, rho_); }

 private:
  explicit DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {}
  CMatrix rho_;
};

/// Hermitian generator with its spectral decomposition computed once at
/// construction. Eigenvalues ascend; inside a degenerate cluster the
/// eigenvectors are phase-fixed and ordered lexicographically by rounded
/// entries so the cached basis is reproducible.
class Hamiltonian {
 public:
  explicit Hamiltonian(const CMatrix& h, double hermitian_tol = 1e-12)
      : h_(hermitize(h, hermitian_tol, "Hamiltonian")) {
    Spectrum s = hermitian_eigen(h_);
    canonicalize(s);
    values_ = std::move(s.values);
    vectors_ = std::move(s.vectors);
    const CMatrix rebuilt = vectors_ * values_.cast<Complex>().asDiagonal() * vectors_.adjoint();
    const double err = max_abs(rebuilt - h_);
    if (!(err <= 1e-10 * std::max(1.0, max_abs(h_)))) {
      throw Error(ErrorCode::numerical_degeneracy, "Hamiltonian eigendecomposition is inaccurate",
                  "reconstruction_error=" + std::to_string(err));
    }
  }

  [[nodiscard]] static Hamiltonian diagonal(std::span<const double> energies) {
    RVector e(static_cast<Index>(energies.size()));
    for (Index k = 0; k < e.size(); ++k) e(k) = energies[static_cast<std::size_t>(k)];
    return Hamiltonian(e.cast<Complex>().asDiagonal().toDenseMatrix());
  }

  /// diag(0, spacing, 2 spacing, ...).
  [[nodiscard]] static Hamiltonian ladder(Index dim, double spacing = 1.0, double offset = 0.0) {
    std::vector<double> e(static_cast<std::size_t>(dim));
    for (Index k = 0; k < dim; ++k) e[static_cast<std::size_t>(k)] = offset + spacing * static_cast<double>(k);
    return diagonal(e);
  }

  [[nodiscard]] Index dim() const noexcept { return h_.rows(); }
  [[nodiscard]] const CMatrix& matrix() const noexcept { return h_; }
  [[nodiscard]] const RVector& eigenvalues() const noexcept { return values_; }
  [[nodiscard]] const CMatrix& eigenvectors() const noexcept { return vectors_; }
  [[nodiscard]] double ground_energy() const { return values_(0); }

  /// exp(-i H t) from the cached decomposition.
  [[nodiscard]] CMatrix propagator(double t) const {
    CVector phases(values_.size());
    for (Index k = 0; k < values_.size(); ++k) phases(k) = std::exp(-kI * values_(k) * t);
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
  }

  [[nodiscard]] Hamiltonian shifted(double offset) const {
    return Hamiltonian(h_ + offset * CMatrix::Identity(dim(), dim()));
  }
  [[nodiscard]] Hamiltonian scaled(double factor) const { return Hamiltonian(factor * h_); }

 private:
  static void canonicalize(Spectrum& s) {
    const Index n = s.values.size();
    for (Index j = 0; j < n; ++j) {
      auto col = s.vectors.col(j);
      for (Index k = 0; k < n; ++k) {
        if (std::abs(col(k)) > 1e-8) {
          col *= std::conj(col(k)) / std::abs(col(k));
          break;
        }
      }
    }
    const double scale = std::max(1.0, s.values.cwiseAbs().maxCoeff());
    for (auto [begin, end] : group_sorted_values(s.values, 1e-12 * scale)) {
      if (end - begin < 2) continue;
      std::vector<Index> order(static_cast<std::size_t>(end - begin));
      std::iota(order.begin(), order.end(), begin);
      auto rounded = [](Complex z) {
        return std::pair{std::round(z.real() * 1e9), std::round(z.imag() * 1e9)};
      };
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        for (Index k = 0; k < n; ++k) {
          const auto ra = rounded(s.vectors(k, a));
          const auto rb = rounded(s.vectors(k, b));
          if (ra != rb) return ra > rb;
        }
        return false;
      });
      const CMatrix block = s.vectors.middleCols(begin, end - begin);
      for (Index j = 0; j < end - begin; ++j) {
        s.vectors.col(begin + j) = block.col(order[static_cast<std::size_t>(j)] - begin);
      }
    }
  }

  CMatrix h_;
  RVector values_;
  CMatrix vectors_;
};

/// A clock: state rho and Hamiltonian H on the same Hilbert space.
class ClockSystem {
 public:
  ClockSystem(DensityMatrix state, Hamiltonian hamiltonian)
      : state_(std::move(state)), hamiltonian_(std::move(hamiltonian)) {
    if (state_.dim() != hamiltonian_.dim()) {
      throw Error(ErrorCode::dimension_mismatch, "clock state and Hamiltonian dimensions differ",
                  std::to_string(state_.dim()) + " vs " + std::to_string(hamiltonian_.dim()));
    }
  }

  [[nodiscard]] const DensityMatrix& state() const noexcept { return state_; }
  [[nodiscard]] const Hamiltonian& hamiltonian() const noexcept { return hamiltonian_; }
  [[nodiscard]] Index dim() const noexcept { return state_.dim(); }

 private:
  DensityMatrix state_;
  Hamiltonian hamiltonian_;
};

/// rho_t = exp(-iHt) rho exp(iHt).
[[nodiscard]] inline DensityMatrix evolve(const DensityMatrix& rho, const Hamiltonian& h, double t) {
  if (!std::isfinite(t)) throw Error(ErrorCode::domain, "evolution time must be finite");
  if (rho.dim() != h.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "state and Hamiltonian dimensions differ");
  }
  const CMatrix u = h.propagator(t);
  return DensityMatrix::from_matrix(u * rho.matrix() * u.adjoint());
}

[[nodiscard]] inline DensityMatrix evolve(const ClockSystem& clock, double t) {
  return evolve(clock.state(), clock.hamiltonian(), t);
}

[[nodiscard]] inline CVector evolve_vector(const CVector& psi, const Hamiltonian& h, double t) {
  if (!std::isfinite(t)) throw Error(ErrorCode::domain, "evolution time must be finite");
  if (psi.size() != h.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "state vector and Hamiltonian dimensions differ");
  }
  return h.propagator(t) * psi;
}

struct EnergyMoments {
  double mean = 0.0;
  double second_moment = 0.0;
  double std_dev = 0.0;
};

/// Moments of H in state rho. The variance is accumulated about the mean in
/// H's eigenbasis, which keeps std_dev accurate when mean^2 dominates.
[[nodiscard]] inline EnergyMoments energy_moments(const DensityMatrix& rho, const Hamiltonian& h) {
  if (rho.dim() != h.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "state and Hamiltonian dimensions differ");
  }
  const CMatrix& v = h.eigenvectors();
  const RVector& e = h.eigenvalues();
  const CMatrix in_basis = v.adjoint() * rho.matrix() * v;
  RVector p = in_basis.diagonal().real();
  double mean = 0.0;
  double second = 0.0;
  for (Index k = 0; k < p.size(); ++k) {
    mean += p(k) * e(k);
    second += p(k) * e(k) * e(k);
  }
  double var = 0.0;
  for (Index k = 0; k < p.size(); ++k) var += p(k) * (e(k) - mean) * (e(k) - mean);
  return {mean, second, std::sqrt(std::max(0.0, var))};
}

[[nodiscard]] inline EnergyMoments energy_moments(const ClockSystem& clock) {
  return energy_moments(clock.state(), clock.hamiltonian());
}

/// Pure state whose energy distribution over H's eigenbasis is a discretized
/// Gaussian with standard deviation `sigma`: amplitudes are proportional to
/// exp(-(E_k - mean)^2 / (4 sigma^2)). The realized spread on the discrete
/// spectrum is whatever energy_moments reports.
[[nodiscard]] inline DensityMatrix gaussian_energy_pure_state(const Hamiltonian& h, double mean,
                                                              double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mean)) {
    throw Error(ErrorCode::domain, "Gaussian energy width must be positive and finite",
                "sigma=" + std::to_string(sigma));
  }
  const RVector& e = h.eigenvalues();
  RVector log_amp(e.size());
  for (Index k = 0; k < e.size(); ++k) {
    log_amp(k) = -(e(k) - mean) * (e(k) - mean) / (4.0 * sigma * sigma);
  }
  const double peak = log_amp.maxCoeff();
  CVector coeffs(e.size());
  for (Index k = 0; k < e.size(); ++k) coeffs(k) = std::exp(log_amp(k) - peak);
  return DensityMatrix::pure(h.eigenvectors() * coeffs);
}

[[nodiscard]] inline CVector equal_superposition_vector(Index n) {
  return CVector::Constant(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
}

/// H = diag(E, 2E, ..., nE) with the uniform superposition of its eigenstates.
[[nodiscard]] inline ClockSystem equal_superposition_clock(Index n, double energy_quantum) {
  if (n < 1) throw Error(ErrorCode::domain, "equal superposition needs n >= 1");
  if (!(energy_quantum > 0.0) || !std::isfinite(energy_quantum)) {
    throw Error(ErrorCode::domain, "energy quantum must be positive");
  }
  return ClockSystem(DensityMatrix::pure(equal_superposition_vector(n)),
                     Hamiltonian::ladder(n, energy_quantum, energy_quantum));
}

/// G G^dagger / tr(G G^dagger) for a dim x rank seeded complex Gaussian G.
[[nodiscard]] inline DensityMatrix random_density(Index dim, Index rank, Seed seed) {
  if (dim < 1 || rank < 1 || rank > dim) {
    throw Error(ErrorCode::domain, "random_density requires 1 <= rank <= dim",
                "dim=" + std::to_string(dim) + " rank=" + std::to_string(rank));
  }
  GaussianSource source(seed);
  const CMatrix g = source.complex_matrix(dim, rank);
  const CMatrix gg = g * g.adjoint();
  return DensityMatrix::from_matrix(gg / real_trace(gg));
}

/// (A + A^dagger) / 2 for a seeded complex Gaussian A.
[[nodiscard]] inline Hamiltonian random_hamiltonian(Index dim, Seed seed) {
  if (dim < 1) throw Error(ErrorCode::domain, "dimension must be positive");
  GaussianSource source(seed);
  const CMatrix a = source.complex_matrix(dim, dim);
  return Hamiltonian(0.5 * (a + a.adjoint()));
}

/// Haar-distributed unitary (QR of a complex Gaussian with phase fixing).
[[nodiscard]] inline CMatrix random_unitary(Index dim, Seed seed) {
  if (dim < 1) throw Error(ErrorCode::domain, "dimension must be positive");
  GaussianSource source(seed);
  return orthonormal_columns(source.complex_matrix(dim, dim));
}

/// U diag(spectrum) U^dagger for a seeded Haar unitary U.
[[nodiscard]] inline Hamiltonian random_hamiltonian_with_spectrum(std::span<const double> spectrum,
                                                                  Seed seed) {
  const Index dim = static_cast<Index>(spectrum.size());
  const CMatrix u = random_unitary(dim, seed);
  RVector e(dim);
  for (Index k = 0; k < dim; ++k) e(k) = spectrum[static_cast<std::size_t>(k)];
  return Hamiltonian(u * e.cast<Complex>().asDiagonal() * u.adjoint());
}

}  // namespace qclock
