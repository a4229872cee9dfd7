#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qclock/linalg.hpp"
#include "qclock/qstate.hpp"

namespace qclock {

/// i [H, rho]. The orbit satisfies d/dt rho_t = -rho_dot at t = 0; only
/// quadratic expressions in rho_dot are used, so the sign is immaterial.
[[nodiscard]] inline CMatrix rho_dot(const ClockSystem& clock) {
  const CMatrix& h = clock.hamiltonian().matrix();
  const CMatrix& rho = clock.state().matrix();
  CMatrix d = kI * commutator(h, rho);
  return 0.5 * (d + d.adjoint());
}

struct SldResult {
  CMatrix sld;             // symmetric logarithmic derivative L
  double fisher_info = 0;  // tr(rho_dot L)
  Index kernel_dim = 0;    // number of eigenvalues p_k with 2 p_k <= cutoff
  double residual = 0;     // max-abs of (rho L + L rho)/2 - rho_dot
};

/// Quantum Fisher timing information via the pseudo-inverse of
/// Gamma(a) = (rho a + a rho)/2. In rho's eigenbasis
///   L_kl = 2 rho_dot_kl / (p_k + p_l)   for p_k + p_l > cutoff, else 0,
/// and F = sum 2 |rho_dot_kl|^2 / (p_k + p_l) over the same pairs.
[[nodiscard]] inline SldResult qfi(const ClockSystem& clock, double cutoff = 1e-12) {
  const CMatrix& rho = clock.state().matrix();
  const CMatrix rd = rho_dot(clock);
  const Spectrum s = hermitian_eigen(rho);
  const CMatrix rd_eig = s.vectors.adjoint() * rd * s.vectors;
  const Index n = rho.rows();

  CMatrix l_eig = CMatrix::Zero(n, n);
  double f = 0.0;
  Index kernel = 0;
  for (Index k = 0; k < n; ++k) {
    if (2.0 * s.values(k) <= cutoff) ++kernel;
    for (Index l = 0; l < n; ++l) {
      const double denom = s.values(k) + s.values(l);
      if (denom > cutoff) {
        l_eig(k, l) = 2.0 * rd_eig(k, l) / denom;
        f += 2.0 * std::norm(rd_eig(k, l)) / denom;
      }
    }
  }
  CMatrix l = s.vectors * l_eig * s.vectors.adjoint();
  l = 0.5 * (l + l.adjoint());

  SldResult out;
  out.residual = max_abs(0.5 * (rho * l + l * rho) - rd);
  out.sld = std::move(l);
  out.fisher_info = std::max(0.0, f);
  out.kernel_dim = kernel;
  return out;
}

/// (tr(rho_dot A))^2 / tr(rho A^2) for a Hermitian trial observable A; empty
/// when the denominator is numerically zero.
[[nodiscard]] inline std::optional<double> rayleigh_quotient(const ClockSystem& clock,
                                                             const CMatrix& a) {
  const CMatrix& rho = clock.state().matrix();
  const double num = real_trace_product(rho_dot(clock), a);
  const double den = real_trace_product(rho, a * a);
  const double scale = a.squaredNorm();
  if (!(den > 1e-14 * scale) || scale == 0.0) return std::nullopt;
  return num * num / den;
}

struct VariationalOptions {
  int restarts = 8;
  int iterations = 200;
  Seed seed = 0;
  bool include_sld_start = true;
};

struct VariationalResult {
  double value = 0.0;
  CMatrix argmax;
};

namespace detail {

[[nodiscard]] inline CMatrix random_hermitian(GaussianSource& source, Index n) {
  const CMatrix g = source.complex_matrix(n, n);
  return 0.5 * (g + g.adjoint());
}

/// Local ascent on the quotient by exact maximization over span{A, grad, A - A_prev}.
/// The quotient is a ratio of a squared linear form to a positive quadratic form,
/// so the subspace optimum is n^T D^+ n with c = D^+ n.
inline CMatrix ascend(const CMatrix& rho, const CMatrix& rd, CMatrix a, int iterations) {
  auto quad = [&](const CMatrix& x, const CMatrix& y) { return real_trace_product(rho, x * y); };
  auto normalize = [&](CMatrix& x) {
    const double d = quad(x, x);
    if (d > 0.0) x /= std::sqrt(d);
  };
  normalize(a);
  CMatrix prev = CMatrix::Zero(a.rows(), a.cols());
  double best = -1.0;
  for (int it = 0; it < iterations; ++it) {
    const double num = real_trace_product(rd, a);
    CMatrix grad = 2.0 * num * rd - num * num * (rho * a + a * rho);
    grad = 0.5 * (grad + grad.adjoint());

    std::vector<CMatrix> basis;
    for (const CMatrix* cand : {&a, &grad, &prev}) {
      CMatrix v = *cand;
      for (const CMatrix& b : basis) v -= real_trace_product(b, v) * b;
      const double nv = v.norm();
      if (nv > 1e-12 * std::max(1.0, cand->norm())) basis.push_back(v / nv);
    }
    const auto k = static_cast<Index>(basis.size());
    RMatrix d(k, k);
    RVector nvec(k);
    for (Index i = 0; i < k; ++i) {
      nvec(i) = real_trace_product(rd, basis[static_cast<std::size_t>(i)]);
      for (Index j = 0; j <= i; ++j) {
        d(i, j) = d(j, i) = 0.5 * (quad(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]) +
                                   quad(basis[static_cast<std::size_t>(j)], basis[static_cast<std::size_t>(i)]));
      }
    }
    const Eigen::SelfAdjointEigenSolver<RMatrix> es(d);
    const double dmax = es.eigenvalues().cwiseAbs().maxCoeff();
    RVector coeffs = RVector::Zero(k);
    double value = 0.0;
    for (Index m = 0; m < k; ++m) {
      const double lam = es.eigenvalues()(m);
      if (lam > 1e-12 * dmax) {
        const double proj = es.eigenvectors().col(m).dot(nvec);
        coeffs += (proj / lam) * es.eigenvectors().col(m);
        value += proj * proj / lam;
      }
    }
    CMatrix next = CMatrix::Zero(a.rows(), a.cols());
    for (Index m = 0; m < k; ++m) next += coeffs(m) * basis[static_cast<std::size_t>(m)];
    normalize(next);
    if (!(quad(next, next) > 0.0)) break;
    prev = next - a;
    a = std::move(next);
    if (value <= best * (1.0 + 1e-15)) break;
    best = value;
  }
  return a;
}

}  // namespace detail

/// Variational timing information: maximizes (tr(rho_dot A))^2 / tr(rho A^2)
/// over Hermitian A from seeded random starts, plus the SLD when requested.
/// Candidates with a vanishing denominator are discarded.
[[nodiscard]] inline VariationalResult variational_qfi(const ClockSystem& clock,
                                                       const VariationalOptions& options) {
  const CMatrix& rho = clock.state().matrix();
  const CMatrix rd = rho_dot(clock);
  const Index n = clock.dim();
  VariationalResult best{0.0, CMatrix::Identity(n, n)};

  auto consider = [&](const CMatrix& a) {
    if (const auto r = rayleigh_quotient(clock, a); r && *r > best.value) {
      best.value = *r;
      best.argmax = a;
    }
  };

  std::vector<CMatrix> starts;
  if (options.include_sld_start) starts.push_back(qfi(clock).sld);
  for (int r = 0; r < options.restarts; ++r) {
    GaussianSource source(derive_seed(options.seed, static_cast<Seed>(r)));
    starts.push_back(detail::random_hermitian(source, n));
  }
  for (const CMatrix& start : starts) {
    consider(start);
    if (!rayleigh_quotient(clock, start)) continue;
    consider(detail::ascend(rho, rd, start, options.iterations));
  }
  return best;
}

[[nodiscard]] inline VariationalResult variational_qfi(const ClockSystem& clock, int restarts,
                                                       int iterations, Seed seed) {
  return variational_qfi(clock, VariationalOptions{restarts, iterations, seed, true});
}

/// Timing uncertainty 1/sqrt(F) of the best unbiased estimate.
[[nodiscard]] inline double time_uncertainty(double fisher_info) {
  if (!(fisher_info > 0.0)) {
    throw Error(ErrorCode::domain, "unbounded uncertainty: Fisher information is not positive",
                "fisher_info=" + std::to_string(fisher_info));
  }
  return 1.0 / std::sqrt(fisher_info);
}

// ---------------------------------------------------------------------------
// Classical signals

struct GridSpec {
  double min = -1.0;
  double max = 1.0;
  Index points = 2;

  [[nodiscard]] std::vector<double> values() const {
    if (points < 2 || !(max > min)) {
      throw Error(ErrorCode::domain, "grid needs at least two points and max > min");
    }
    std::vector<double> out(static_cast<std::size_t>(points));
    const double step = (max - min) / static_cast<double>(points - 1);
    for (Index k = 0; k < points; ++k) out[static_cast<std::size_t>(k)] = min + step * static_cast<double>(k);
    return out;
  }
};

/// Time-parameterized discrete probability vectors p(x | t) over fixed sample
/// points. Every vector produced is checked for nonnegativity and unit sum.
class ClassicalSignalFamily {
 public:
  using DensityFn = std::function<std::vector<double>(double)>;

  ClassicalSignalFamily(std::string name, std::vector<double> sample_points, DensityFn density)
      : name_(std::move(name)), points_(std::move(sample_points)), density_(std::move(density)) {
    if (points_.empty()) throw Error(ErrorCode::domain, "signal family needs sample points");
  }

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const std::vector<double>& sample_points() const noexcept { return points_; }

  [[nodiscard]] std::vector<double> density_at(double t) const {
    std::vector<double> p = density_(t);
    if (p.size() != points_.size()) {
      throw Error(ErrorCode::dimension_mismatch, "probability vector length differs from sample points");
    }
    double total = 0.0;
    for (double v : p) {
      if (!(v >= 0.0)) throw Error(ErrorCode::validation, "negative or NaN probability");
      total += v;
    }
    if (!(std::abs(total - 1.0) <= 1e-10)) {
      throw Error(ErrorCode::validation, "probabilities do not sum to one",
                  "sum=" + std::to_string(total));
    }
    return p;
  }

 private:
  std::string name_;
  std::vector<double> points_;
  DensityFn density_;
};

namespace detail {

[[nodiscard]] inline std::vector<double> normalized_gaussian(const std::vector<double>& xs, double center,
                                                             double width) {
  std::vector<double> p(xs.size());
  double total = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double z = (xs[k] - center) / width;
    p[k] = std::exp(-0.5 * z * z);
    total += p[k];
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::numerical_support, "Gaussian profile has no mass on the grid");
  }
  for (double& v : p) v /= total;
  return p;
}

}  // namespace detail

/// Arrival-time distribution of a sharp pulse delayed by a Gaussian random
/// delay of standard deviation `delay_std`: p(x | t) ~ N(t, delay_std^2) on
/// the arrival-time grid. Its Fisher information tends to 1/delay_std^2.
[[nodiscard]] inline ClassicalSignalFamily gaussian_delay_family(double delay_std, const GridSpec& grid) {
  if (!(delay_std > 0.0)) throw Error(ErrorCode::domain, "delay standard deviation must be positive");
  auto xs = grid.values();
  return ClassicalSignalFamily("gaussian_delay", xs, [xs, delay_std](double t) {
    return detail::normalized_gaussian(xs, t, delay_std);
  });
}

/// Position of a signal moving at `velocity` with Gaussian position
/// uncertainty `position_std`: p(x | t) ~ N(x0 + v t, dx^2). F tends to v^2/dx^2.
[[nodiscard]] inline ClassicalSignalFamily moving_gaussian_family(double velocity, double position_std,
                                                                  const GridSpec& grid, double x0 = 0.0) {
  if (!(position_std > 0.0)) throw Error(ErrorCode::domain, "position standard deviation must be positive");
  auto xs = grid.values();
  return ClassicalSignalFamily("moving_gaussian", xs, [xs, velocity, position_std, x0](double t) {
    return detail::normalized_gaussian(xs, x0 + velocity * t, position_std);
  });
}

/// Probability vectors tabulated at ascending times, linearly interpolated in t
/// and held constant outside the table.
[[nodiscard]] inline ClassicalSignalFamily tabulated_family(std::vector<double> sample_points,
                                                            std::vector<double> times,
                                                            std::vector<std::vector<double>> probabilities) {
  if (times.empty() || times.size() != probabilities.size()) {
    throw Error(ErrorCode::dimension_mismatch, "tabulated family needs one probability row per time");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw Error(ErrorCode::domain, "tabulated times must ascend");
  }
  return ClassicalSignalFamily(
      "tabulated", std::move(sample_points),
      [times = std::move(times), rows = std::move(probabilities)](double t) {
        if (t <= times.front()) return rows.front();
        if (t >= times.back()) return rows.back();
        const auto hi = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
        const std::size_t lo = hi - 1;
        const double w = (t - times[lo]) / (times[hi] - times[lo]);
        std::vector<double> p(rows[lo].size());
        for (std::size_t x = 0; x < p.size(); ++x) p[x] = (1.0 - w) * rows[lo][x] + w * rows[hi][x];
        return p;
      });
}

/// Central-difference Fisher information sum_x (d_t p(x|t))^2 / p(x|t).
[[nodiscard]] inline double classical_fisher(const ClassicalSignalFamily& family, double t, double dt = 1e-4) {
  if (!(dt > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::domain, "finite-difference step must be positive");
  const auto p = family.density_at(t);
  const auto plus = family.density_at(t + dt);
  const auto minus = family.density_at(t - dt);
  double peak = 0.0;
  for (double v : p) peak = std::max(peak, v);
  constexpr double kFloor = 1e-300;
  double f = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] > kFloor) {
      const double deriv = (plus[x] - minus[x]) / (2.0 * dt);
      f += deriv * deriv / p[x];
    } else if (std::max(plus[x], minus[x]) > 1e-12 * peak) {
      throw Error(ErrorCode::numerical_support,
                  "probability moves onto a point with zero probability at t",
                  "sample_index=" + std::to_string(x));
    }
  }
  return std::max(0.0, f);
}

}  // namespace qclock
