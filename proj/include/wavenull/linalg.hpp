#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace wavenull {

/// Symmetric band matrix stored as its lower band, row by row.
///
/// Row i holds columns i-bw .. i contiguously, so both the Cholesky inner
/// products and the triangular solves stream through memory.
class BandedSpdMatrix {
 public:
  BandedSpdMatrix() = default;
  BandedSpdMatrix(std::size_t n, int half_bandwidth);

  std::size_t order() const { return n_; }
  int half_bandwidth() const { return bw_; }

  /// Entry (i,j) with |i-j| <= bw; the symmetric counterpart is implied.
  double operator()(std::size_t i, std::size_t j) const;
  void add(std::size_t i, std::size_t j, double value);
  void set(std::size_t i, std::size_t j, double value);

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  double quadratic_form(std::span<const double> x) const;
  /// b - A x accumulated in extended precision (for iterative refinement).
  std::vector<double> residual(std::span<const double> x, std::span<const double> b) const;

  /// max |a_ij| over the stored band.
  double max_abs() const;

  /// Triplets (row, col, value) of the lower band, one per line.
  void dump(std::ostream& out) const;

  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }

 private:
  double& at(std::size_t i, std::size_t j) { return data_[i * (bw_ + 1) + (j + bw_ - i)]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * (bw_ + 1) + (j + bw_ - i)]; }

  std::size_t n_ = 0;
  int bw_ = 0;
  std::vector<double> data_;
};

/// In-band Cholesky factor L with M = L L^T.
class CholeskyFactor {
 public:
  /// Consumes the matrix storage. Throws not_spd with the failing row.
  static CholeskyFactor factorize(BandedSpdMatrix m);

  std::size_t order() const { return l_.order(); }
  double entry(std::size_t i, std::size_t j) const { return l_(i, j); }

  std::vector<double> solve(std::span<const double> b) const;
  void solve_in_place(std::span<double> x) const;

  /// L L^T x, for reconstruction checks.
  std::vector<double> reconstruct_multiply(std::span<const double> x) const;

 private:
  explicit CholeskyFactor(BandedSpdMatrix l) : l_(std::move(l)) {}
  BandedSpdMatrix l_;
};

struct EigenEstimate {
  double value = 0.0;
  int iterations = 0;
};

/// Largest eigenvalue of M^{-1} A by power iteration (A symmetric PSD, M SPD
/// through its factor). Converged when successive Rayleigh quotients agree to
/// `rel_tol`. Throws no_convergence after `max_iter` steps.
EigenEstimate observability_constant(const BandedSpdMatrix& a, const CholeskyFactor& m_factor,
                                     double rel_tol = 1e-8, int max_iter = 10000,
                                     std::uint64_t seed = 0x5EED);

/// Spectral condition number lambda_max(M) / lambda_min(M) via two power
/// iterations (on M and on M^{-1}).
EigenEstimate condition_estimate(const BandedSpdMatrix& m, const CholeskyFactor& m_factor,
                                 double rel_tol = 1e-6, int max_iter = 10000,
                                 std::uint64_t seed = 0x5EED);

}  // namespace wavenull
