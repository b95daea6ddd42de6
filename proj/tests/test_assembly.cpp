#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "doctest.h"
#include "wavenull/assembly.hpp"

using namespace wavenull;

namespace {

constexpr double pi = std::numbers::pi;

ProblemConfig base_config(int nx, int nt, double T) {
  ProblemConfig c;
  c.weights.T = T;
  c.potential = PotentialField::constant(1.0);
  c.data = {DataFunction::parse("sin"), DataFunction::parse("zero")};
  c.nx = nx;
  c.nt = nt;
  c.enforce_horizon = false;
  return c;
}

std::shared_ptr<const DofMap> dofs_of(const ProblemConfig& c) {
  return std::make_shared<const DofMap>(SpaceTimeMesh(c.nx, c.nt, c.weights.T));
}

FieldPh random_field(std::shared_ptr<const DofMap> d, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(d->num_free());
  for (double& v : c) v = u(gen);
  return FieldPh(d, c);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("wave operator on closed forms") {
  const auto one = CoefficientField::constant(1.0);
  const double x = 0.3, t = 0.8;
  PointJet q{x * (1 - x), 1 - 2 * x, 0.0, -2.0, 0.0};
  CHECK(apply_L(q, one, PotentialField::constant(0.0), x, t) == doctest::Approx(2.0));
  CHECK(apply_L(q, one, PotentialField::constant(1.0), x, t) == doctest::Approx(2.0 + x * (1 - x)));
  const double s = std::sin(pi * x), c = std::cos(pi * t);
  PointJet w{s * c, pi * std::cos(pi * x) * c, -pi * s * std::sin(pi * t), -pi * pi * s * c,
             -pi * pi * s * c};
  CHECK(std::abs(apply_L(w, one, PotentialField::constant(0.0), x, t)) < 1e-12);
  // a = 1 + x: the a_x q_x term enters with a minus sign.
  const auto lin = CoefficientField::polynomial({1.0, 1.0});
  CHECK(apply_L(q, lin, PotentialField::constant(0.0), x, t) ==
        doctest::Approx(-(1 - 2 * x) + 2 * (1 + x)));
}

TEST_CASE("interpolated weights agree with exact ones at the nodes") {
  const ProblemConfig c = base_config(4, 8, 2.2);
  const CarlemanWeights w(c.weights);
  const SpaceTimeMesh m(4, 8, 2.2);
  const WeightField wf(w, m, WeightMode::interpolated);
  const WeightField we(w, m, WeightMode::exact);
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 8; ++l) {
      CHECK(wf.interior(k, l, 0.0, 0.0) == doctest::Approx(w.rho_inv2(m.x(k), m.t(l))));
      CHECK(we.interior(k, l, 0.5, 0.5) ==
            doctest::Approx(w.rho_inv2(m.x(k) + 0.5 * m.dx(), m.t(l) + 0.5 * m.dt())));
    }
    CHECK(we.boundary(k, 0.25) == doctest::Approx(w.control_weight(m.t(k) + 0.25 * m.dt())));
  }
}

TEST_CASE("M is symmetric and agrees with the matrix-free form") {
  const ProblemConfig c = base_config(4, 4, 2.2);
  auto d = dofs_of(c);
  for (WeightMode mode : {WeightMode::exact, WeightMode::interpolated}) {
    const BandedSpdMatrix M = assemble_M(*d, c, mode);
    const FieldPh p = random_field(d, 1), q = random_field(d, 2);
    const auto Mq = M.multiply(q.coeffs());
    const double banded = dot(p.coeffs(), Mq);
    const double free_form = energy_form(p, q, c, mode);
    CHECK(banded == doctest::Approx(free_form).epsilon(1e-11));
    CHECK(energy_form(q, p, c, mode) == doctest::Approx(free_form).epsilon(1e-12));
    CHECK(energy_norm_sq(p, c, mode) == doctest::Approx(M.quadratic_form(p.coeffs())).epsilon(1e-11));
  }
}

TEST_CASE("unweighted form of x(1-x) is 4T") {
  ProblemConfig c = base_config(5, 6, 1.7);
  c.potential = PotentialField::constant(0.0);
  auto d = dofs_of(c);
  const FieldPh p = interpolate({[](double x, double) { return x * (1 - x); },
                                 [](double x, double) { return 1 - 2 * x; },
                                 [](double, double) { return 0.0; },
                                 [](double, double) { return 0.0; }},
                                d);
  const BandedSpdMatrix M = assemble_M_unweighted(*d, c);
  CHECK(M.quadratic_form(p.coeffs()) == doctest::Approx(4 * 1.7).epsilon(1e-12));
}

TEST_CASE("exact-mode quadrature converges with the Gauss order") {
  // The interior weight exp(2 s e^{lambda phi}) is not polynomial, so orders
  // 5 and 7 differ at the 1e-7 level on this coarse mesh; 7 and 9 agree.
  const ProblemConfig c = base_config(8, 8, 2.2);
  auto d = dofs_of(c);
  const BandedSpdMatrix m5 = assemble_M(*d, c, WeightMode::exact, 5);
  const BandedSpdMatrix m7 = assemble_M(*d, c, WeightMode::exact, 7);
  const BandedSpdMatrix m9 = assemble_M(*d, c, WeightMode::exact, 9);
  double d57 = 0.0, d79 = 0.0;
  for (std::size_t i = 0; i < m5.raw().size(); ++i) {
    d57 = std::max(d57, std::abs(m5.raw()[i] - m7.raw()[i]));
    d79 = std::max(d79, std::abs(m7.raw()[i] - m9.raw()[i]));
  }
  CHECK(d57 / m7.max_abs() < 1e-6);
  CHECK(d79 / m9.max_abs() < 1e-10);
}

TEST_CASE("Poisson inverse") {
  std::vector<double> ones(11, 1.0), xs(11), mix(11);
  for (int k = 0; k <= 10; ++k) {
    xs[k] = k / 10.0;
    mix[k] = 2.0 * ones[k] - 3.0 * xs[k];
  }
  const auto w1 = neg_laplacian_inverse_1d(ones);
  const auto wx = neg_laplacian_inverse_1d(xs);
  const auto wm = neg_laplacian_inverse_1d(mix);
  for (double x = 0.0; x <= 1.0; x += 0.03125) {
    CHECK(w1.value(x) == doctest::Approx(x * (1 - x) / 2).epsilon(1e-13).scale(1.0));
    CHECK(w1.slope(x) == doctest::Approx((1 - 2 * x) / 2).epsilon(1e-13).scale(1.0));
    CHECK(wx.value(x) == doctest::Approx((x - x * x * x) / 6).epsilon(1e-13).scale(1.0));
    CHECK(wm.value(x) == doctest::Approx(2 * w1.value(x) - 3 * wx.value(x)).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("load vector") {
  ProblemConfig c = base_config(40, 4, 1.0);
  auto d = dofs_of(c);
  InitialData zero{DataFunction::parse("zero"), DataFunction::parse("zero")};
  for (double v : assemble_rhs(*d, zero)) CHECK(v == 0.0);

  // q = sin(pi x), constant in time: l(q) = -int pi(y1) q -> -1/2.
  InitialData vel{DataFunction::parse("zero"), DataFunction::parse("sin")};
  const FieldPh q = interpolate({[](double x, double) { return std::sin(pi * x); },
                                 [](double x, double) { return pi * std::cos(pi * x); },
                                 [](double, double) { return 0.0; },
                                 [](double, double) { return 0.0; }},
                                d);
  CHECK(load_functional(q, vel) == doctest::Approx(-0.5).epsilon(1e-3));

  // q = sin(pi x) t: l(q) = int pi(y0) q_t(.,0) -> 1/2.
  InitialData pos{DataFunction::parse("sin"), DataFunction::parse("zero")};
  const FieldPh qt = interpolate({[](double x, double t) { return std::sin(pi * x) * t; },
                                  [](double x, double t) { return pi * std::cos(pi * x) * t; },
                                  [](double x, double) { return std::sin(pi * x); },
                                  [](double x, double) { return pi * std::cos(pi * x); }},
                                 d);
  CHECK(load_functional(qt, pos) == doctest::Approx(0.5).epsilon(1e-3));

  InitialData both{DataFunction::parse("gaussian 500 0.2"), DataFunction::parse("indicator 0.2 0.5 10")};
  const auto b = assemble_rhs(*d, both);
  const FieldPh r = random_field(d, 3);
  CHECK(dot(b, r.coeffs()) == doctest::Approx(load_functional(r, both)).epsilon(1e-11));
}

TEST_CASE("observation Gram matrix") {
  const double T = 1.6;
  ProblemConfig c = base_config(6, 5, T);
  auto d = dofs_of(c);
  const BandedSpdMatrix A = assemble_A_obs(*d);
  const FieldPh p = interpolate({[=](double x, double t) { return x * (1 - x) * (1 - t / T); },
                                 [=](double x, double t) { return (1 - 2 * x) * (1 - t / T); },
                                 [=](double x, double) { return -x * (1 - x) / T; },
                                 [=](double x, double) { return -(1 - 2 * x) / T; }},
                                d);
  CHECK(A.quadratic_form(p.coeffs()) == doctest::Approx(1.0 / 3 + 1.0 / (30 * T * T)).epsilon(1e-12));
  CHECK(A.quadratic_form(FieldPh(d).coeffs()) == 0.0);
  for (unsigned s = 0; s < 100; ++s) {
    CHECK(A.quadratic_form(random_field(d, 100 + s).coeffs()) >= -1e-12);
  }
}
