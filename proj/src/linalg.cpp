#include "wavenull/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "wavenull/error.hpp"

namespace wavenull {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<double> random_start(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  const double nv = norm2(v);
  for (double& x : v) x /= nv;
  return v;
}

void check_length(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw Error(ErrorCode::invalid_argument, "dimension mismatch: expected " +
                                                 std::to_string(expected) + ", got " +
                                                 std::to_string(got));
  }
}

}  // namespace

BandedSpdMatrix::BandedSpdMatrix(std::size_t n, int half_bandwidth)
    : n_(n), bw_(half_bandwidth), data_(n * static_cast<std::size_t>(half_bandwidth + 1), 0.0) {
  if (half_bandwidth < 0) throw Error(ErrorCode::invalid_argument, "negative bandwidth");
}

double BandedSpdMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  if (i - j > static_cast<std::size_t>(bw_)) return 0.0;
  return at(i, j);
}

void BandedSpdMatrix::add(std::size_t i, std::size_t j, double value) {
  if (i < j) std::swap(i, j);
  if (i >= n_ || i - j > static_cast<std::size_t>(bw_)) {
    throw Error(ErrorCode::invalid_argument, "band matrix: entry outside the band");
  }
  at(i, j) += value;
}

void BandedSpdMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i < j) std::swap(i, j);
  if (i >= n_ || i - j > static_cast<std::size_t>(bw_)) {
    throw Error(ErrorCode::invalid_argument, "band matrix: entry outside the band");
  }
  at(i, j) = value;
}

void BandedSpdMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  check_length(n_, x.size());
  check_length(n_, y.size());
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > static_cast<std::size_t>(bw_) ? i - bw_ : 0;
    const double* row = &data_[i * (bw_ + 1) + (j0 + bw_ - i)];
    double acc = 0.0;
    const double xi = x[i];
    for (std::size_t j = j0; j < i; ++j, ++row) {
      acc += *row * x[j];
      y[j] += *row * xi;
    }
    y[i] += acc + *row * xi;
  }
}

std::vector<double> BandedSpdMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

std::vector<double> BandedSpdMatrix::residual(std::span<const double> x,
                                             std::span<const double> b) const {
  check_length(n_, x.size());
  check_length(n_, b.size());
  std::vector<long double> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > static_cast<std::size_t>(bw_) ? i - bw_ : 0;
    const double* row = &data_[i * (bw_ + 1) + (j0 + bw_ - i)];
    long double acc = 0.0L;
    const long double xi = x[i];
    for (std::size_t j = j0; j < i; ++j, ++row) {
      acc += static_cast<long double>(*row) * x[j];
      y[j] -= *row * xi;
    }
    y[i] -= acc + *row * xi;
  }
  return {y.begin(), y.end()};
}

double BandedSpdMatrix::quadratic_form(std::span<const double> x) const {
  const std::vector<double> y = multiply(x);
  return dot(x, y);
}

double BandedSpdMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

void BandedSpdMatrix::dump(std::ostream& out) const {
  out << "# order " << n_ << " half_bandwidth " << bw_ << "\n# row col value (lower band)\n";
  out.precision(17);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > static_cast<std::size_t>(bw_) ? i - bw_ : 0;
    for (std::size_t j = j0; j <= i; ++j) {
      const double v = at(i, j);
      if (v != 0.0) out << i << ' ' << j << ' ' << v << '\n';
    }
  }
}

// ---------------------------------------------------------------------------

CholeskyFactor CholeskyFactor::factorize(BandedSpdMatrix m) {
  const std::size_t n = m.order();
  const std::ptrdiff_t bw = m.half_bandwidth();
  const std::ptrdiff_t stride = bw + 1;
  double* d = m.raw().data();
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const std::ptrdiff_t j0 = std::max<std::ptrdiff_t>(0, i - bw);
    double* row_i = d + i * stride + bw - i;  // row_i[k] is entry (i,k)
    for (std::ptrdiff_t j = j0; j <= i; ++j) {
      const double* row_j = d + j * stride + bw - j;
      double s = row_i[j];
      for (std::ptrdiff_t k = j0; k < j; ++k) s -= row_i[k] * row_j[k];
      if (j < i) {
        row_i[j] = s / row_j[j];
      } else {
        if (!(s > 0.0)) {
          std::ostringstream msg;
          msg << "matrix is not positive definite: pivot " << s << " at row " << i;
          throw Error(ErrorCode::not_spd, msg.str());
        }
        row_i[i] = std::sqrt(s);
      }
    }
  }
  return CholeskyFactor(std::move(m));
}

void CholeskyFactor::solve_in_place(std::span<double> x) const {
  const std::size_t n = l_.order();
  check_length(n, x.size());
  const std::ptrdiff_t bw = l_.half_bandwidth();
  const std::ptrdiff_t stride = bw + 1;
  const double* d = l_.raw().data();
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const double* row = d + i * stride + bw - i;
    const std::ptrdiff_t j0 = std::max<std::ptrdiff_t>(0, i - bw);
    double s = x[i];
    for (std::ptrdiff_t k = j0; k < i; ++k) s -= row[k] * x[k];
    x[i] = s / row[i];
  }
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(n) - 1; i >= 0; --i) {
    const double* row = d + i * stride + bw - i;
    const std::ptrdiff_t j0 = std::max<std::ptrdiff_t>(0, i - bw);
    const double xi = x[i] / row[i];
    x[i] = xi;
    for (std::ptrdiff_t k = j0; k < i; ++k) x[k] -= row[k] * xi;
  }
}

std::vector<double> CholeskyFactor::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

std::vector<double> CholeskyFactor::reconstruct_multiply(std::span<const double> x) const {
  const std::size_t n = l_.order();
  check_length(n, x.size());
  // y = L^T x, then z = L y
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i > static_cast<std::size_t>(l_.half_bandwidth())
                               ? i - l_.half_bandwidth()
                               : 0;
    for (std::size_t j = j0; j <= i; ++j) y[j] += l_(i, j) * x[i];
  }
  std::vector<double> z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i > static_cast<std::size_t>(l_.half_bandwidth())
                               ? i - l_.half_bandwidth()
                               : 0;
    for (std::size_t j = j0; j <= i; ++j) z[i] += l_(i, j) * y[j];
  }
  return z;
}

// ---------------------------------------------------------------------------

EigenEstimate observability_constant(const BandedSpdMatrix& a, const CholeskyFactor& m_factor,
                                     double rel_tol, int max_iter, std::uint64_t seed) {
  check_length(a.order(), m_factor.order());
  const std::size_t n = a.order();
  std::vector<double> v = random_start(n, seed);
  std::vector<double> y = a.multiply(v);
  std::vector<double> z(n);
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> w = m_factor.solve(y);  // w = M^{-1} A v
    a.multiply(w, z);
    const double wmw = dot(w, y);  // w^T M w = w^T A v
    const double lambda = wmw > 0.0 ? dot(w, z) / wmw : 0.0;
    if (it > 1 && std::abs(lambda - prev) <= rel_tol * std::abs(lambda)) return {lambda, it};
    if (lambda == 0.0 && dot(y, y) == 0.0) return {0.0, it};
    prev = lambda;
    const double nw = norm2(w);
    for (std::size_t i = 0; i < n; ++i) y[i] = z[i] / nw;
  }
  std::ostringstream msg;
  msg << "power iteration did not converge in " << max_iter << " steps (last estimate " << prev
      << ")";
  throw Error(ErrorCode::no_convergence, msg.str());
}

EigenEstimate condition_estimate(const BandedSpdMatrix& m, const CholeskyFactor& m_factor,
                                 double rel_tol, int max_iter, std::uint64_t seed) {
  check_length(m.order(), m_factor.order());
  const std::size_t n = m.order();
  auto power = [&](auto&& apply) {
    std::vector<double> v = random_start(n, seed);
    double prev = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
      std::vector<double> w = apply(v);
      const double lambda = dot(v, w);  // v normalized
      if (it > 1 && std::abs(lambda - prev) <= rel_tol * std::abs(lambda)) {
        return EigenEstimate{lambda, it};
      }
      prev = lambda;
      const double nw = norm2(w);
      for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    }
    std::ostringstream msg;
    msg << "condition estimate did not converge in " << max_iter << " steps (last " << prev << ")";
    throw Error(ErrorCode::no_convergence, msg.str());
  };
  const EigenEstimate hi = power([&](const std::vector<double>& v) { return m.multiply(v); });
  const EigenEstimate lo_inv = power([&](const std::vector<double>& v) { return m_factor.solve(v); });
  return {hi.value * lo_inv.value, hi.iterations + lo_inv.iterations};
}

}  // namespace wavenull
