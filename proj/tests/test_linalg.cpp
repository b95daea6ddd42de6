#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "wavenull/error.hpp"
#include "wavenull/linalg.hpp"

using namespace wavenull;

namespace {

/// Random SPD band matrix C^T C + I with C banded, returned in both storages.
std::pair<BandedSpdMatrix, Eigen::MatrixXd> random_spd(int n, int bw, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int cbw = bw / 2;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - cbw); j <= i; ++j) C(i, j) = u(gen);
  }
  Eigen::MatrixXd B = C.transpose() * C + Eigen::MatrixXd::Identity(n, n);
  BandedSpdMatrix m(n, bw);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - bw); j <= i; ++j) m.set(i, j, B(i, j));
  }
  return {m, B};
}

}  // namespace

TEST_CASE("2x2 Cholesky by hand") {
  BandedSpdMatrix m(2, 1);
  m.set(0, 0, 4.0);
  m.set(1, 0, 2.0);
  m.set(1, 1, 3.0);
  const auto f = CholeskyFactor::factorize(m);
  CHECK(f.entry(0, 0) == doctest::Approx(2.0));
  CHECK(f.entry(1, 0) == doctest::Approx(1.0));
  CHECK(f.entry(1, 1) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("identity factor") {
  BandedSpdMatrix m(6, 2);
  for (int i = 0; i < 6; ++i) m.set(i, i, 1.0);
  const auto f = CholeskyFactor::factorize(m);
  for (int i = 0; i < 6; ++i) {
    for (int j = std::max(0, i - 2); j <= i; ++j) CHECK(f.entry(i, j) == (i == j ? 1.0 : 0.0));
  }
}

TEST_CASE("band storage is symmetric and multiplies like the dense matrix") {
  auto [m, B] = random_spd(30, 5, 7);
  CHECK(m(3, 5) == m(5, 3));
  CHECK(m(10, 2) == 0.0);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(30, -1.0, 2.0);
  std::vector<double> xv(x.data(), x.data() + 30);
  const auto y = m.multiply(xv);
  const Eigen::VectorXd yd = B * x;
  for (int i = 0; i < 30; ++i) CHECK(y[i] == doctest::Approx(yd[i]).epsilon(1e-13));
  CHECK(m.quadratic_form(xv) == doctest::Approx(x.dot(yd)).epsilon(1e-13));
  CHECK(m.max_abs() == doctest::Approx(B.cwiseAbs().maxCoeff()));
  std::ostringstream dump;
  m.dump(dump);
  CHECK(dump.str().find("29 29") != std::string::npos);
}

TEST_CASE("banded Cholesky against Eigen") {
  for (unsigned seed : {1u, 2u, 3u}) {
    auto [m, B] = random_spd(60, 9, seed);
    const auto f = CholeskyFactor::factorize(m);
    const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(B).matrixL();
    double err = 0.0;
    for (int i = 0; i < 60; ++i) {
      for (int j = std::max(0, i - 9); j <= i; ++j) err = std::max(err, std::abs(f.entry(i, j) - L(i, j)));
    }
    CHECK(err < 1e-12 * L.cwiseAbs().maxCoeff());

    Eigen::VectorXd x = Eigen::VectorXd::Random(60);
    const Eigen::VectorXd b = B * x;
    const auto sol = f.solve(std::vector<double>(b.data(), b.data() + 60));
    double e = 0.0;
    for (int i = 0; i < 60; ++i) e = std::max(e, std::abs(sol[i] - x[i]));
    CHECK(e / x.cwiseAbs().maxCoeff() < 1e-10);
    const auto r = f.reconstruct_multiply(std::vector<double>(x.data(), x.data() + 60));
    for (int i = 0; i < 60; ++i) CHECK(r[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("residual in extended precision") {
  auto [m, B] = random_spd(20, 3, 11);
  std::vector<double> x(20, 1.0);
  const auto b = m.multiply(x);
  const auto r = m.residual(x, b);
  for (double v : r) CHECK(std::abs(v) < 1e-14);
  std::vector<double> b2 = b;
  b2[4] += 0.5;
  CHECK(m.residual(x, b2)[4] == doctest::Approx(0.5));
}

TEST_CASE("indefinite matrix reports the failing row") {
  BandedSpdMatrix m(3, 1);
  m.set(0, 0, 1.0);
  m.set(1, 0, 2.0);
  m.set(1, 1, 1.0);
  m.set(2, 2, 1.0);
  try {
    CholeskyFactor::factorize(m);
    FAIL("expected not_spd");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_spd);
    CHECK(std::string(e.what()).find('1') != std::string::npos);
  }
}

TEST_CASE("generalized power iteration") {
  BandedSpdMatrix a(2, 1), id(2, 1);
  a.set(0, 0, 2.0);
  a.set(1, 1, 1.0);
  id.set(0, 0, 1.0);
  id.set(1, 1, 1.0);
  const auto f = CholeskyFactor::factorize(id);
  CHECK(observability_constant(a, f).value == doctest::Approx(2.0).epsilon(1e-7));

  BandedSpdMatrix d(2, 1);
  d.set(0, 0, 100.0);
  d.set(1, 1, 1.0);
  CHECK(condition_estimate(d, CholeskyFactor::factorize(d)).value ==
        doctest::Approx(100.0).epsilon(1e-5));
  CHECK(condition_estimate(id, f).value == doctest::Approx(1.0));
}

TEST_CASE("power iteration against Eigen generalized eigensolver") {
  auto [m, M] = random_spd(40, 6, 5);
  auto [a0, A0] = random_spd(40, 6, 9);
  // Make A only semidefinite: zero its last rows and columns.
  BandedSpdMatrix a(40, 6);
  Eigen::MatrixXd A = A0;
  A.bottomRows(10).setZero();
  A.rightCols(10).setZero();
  for (int i = 0; i < 30; ++i) {
    for (int j = std::max(0, i - 6); j <= i; ++j) a.set(i, j, A(i, j));
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
  const double top = es.eigenvalues().maxCoeff();
  const auto est = observability_constant(a, CholeskyFactor::factorize(m), 1e-12, 100000);
  CHECK(est.value == doctest::Approx(top).epsilon(1e-6));
  CHECK(est.iterations > 0);
}
