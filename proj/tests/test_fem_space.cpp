#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "wavenull/error.hpp"
#include "wavenull/fem_space.hpp"

using namespace wavenull;

namespace {

constexpr double pi = std::numbers::pi;

std::shared_ptr<const DofMap> dofs_for(int nx, int nt, double T) {
  return std::make_shared<const DofMap>(SpaceTimeMesh(nx, nt, T));
}

SmoothFunction2D bubble_t() {
  // x(1-x) t
  return {[](double x, double t) { return x * (1 - x) * t; },
          [](double x, double t) { return (1 - 2 * x) * t; },
          [](double x, double) { return x * (1 - x); },
          [](double x, double) { return 1 - 2 * x; }};
}

SmoothFunction2D bicubic() {
  // x(1-x)(1+xt)(2-t+t^2): degree 3 in each variable
  auto f = [](double x, double t) { return x * (1 - x) * (1 + x * t) * (2 - t + t * t); };
  auto fx = [](double x, double t) {
    return ((1 - 2 * x) * (1 + x * t) + x * (1 - x) * t) * (2 - t + t * t);
  };
  auto ft = [](double x, double t) {
    return x * (1 - x) * (x * (2 - t + t * t) + (1 + x * t) * (2 * t - 1));
  };
  auto fxt = [](double x, double t) {
    const double g = 2 - t + t * t, gt = 2 * t - 1;
    const double a = (1 - 2 * x) * (1 + x * t) + x * (1 - x) * t;
    const double at = (1 - 2 * x) * x + x * (1 - x);
    return at * g + a * gt;
  };
  return {f, fx, ft, fxt};
}

SmoothFunction2D standing() {
  return {[](double x, double t) { return std::sin(pi * x) * std::sin(pi * t); },
          [](double x, double t) { return pi * std::cos(pi * x) * std::sin(pi * t); },
          [](double x, double t) { return pi * std::sin(pi * x) * std::cos(pi * t); },
          [](double x, double t) { return pi * pi * std::cos(pi * x) * std::cos(pi * t); }};
}

}  // namespace

TEST_CASE("Hermite shape functions") {
  const double d = 0.37;
  CHECK(hermite_eval(0, 0.0, d, 0) == 1.0);
  CHECK(hermite_eval(1, 1.0, d, 0) == 1.0);
  CHECK(hermite_eval(2, 0.0, d, 1) == doctest::Approx(1.0));
  CHECK(hermite_eval(3, 1.0, d, 1) == doctest::Approx(1.0));
  for (double c = 0.0; c <= 1.0; c += 0.1) {
    CHECK(hermite_eval(0, c, d, 0) + hermite_eval(1, c, d, 0) == doctest::Approx(1.0));
    const HermiteValues hv = hermite_all(c, d);
    for (int i = 0; i < 4; ++i) {
      CHECK(hv.v[i] == doctest::Approx(hermite_eval(i, c, d, 0)));
      CHECK(hv.d1[i] == doctest::Approx(hermite_eval(i, c, d, 1)));
      CHECK(hv.d2[i] == doctest::Approx(hermite_eval(i, c, d, 2)));
      if (c > 0.05 && c < 0.95) {
        const double h = 1e-6;
        const double fd = (hermite_eval(i, c + h, d, 0) - hermite_eval(i, c - h, d, 0)) / (2 * h * d);
        CHECK(hv.d1[i] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
      }
    }
  }
  // int_0^D |L2|^2 = D^3 / 105
  double s = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const double c = (k + 0.5) / n;
    s += std::pow(hermite_eval(2, c, d, 0), 2) * d / n;
  }
  CHECK(s == doctest::Approx(d * d * d / 105).epsilon(1e-6));
}

TEST_CASE("mesh and DOF numbering") {
  const SpaceTimeMesh m(10, 22, 2.2);
  CHECK(m.dt() == doctest::Approx(0.1));
  CHECK(m.cell_x(1.0) == 9);
  CHECK(m.cell_t(0.0) == 0);
  CHECK(m.cell_t(2.2) == 21);
  CHECK(m.cell_x(0.35) == 3);
  for (auto [nx, nt] : {std::pair{4, 9}, std::pair{10, 22}, std::pair{7, 3}}) {
    const DofMap d(SpaceTimeMesh(nx, nt, 1.0));
    CHECK(d.num_full() == static_cast<std::size_t>(4 * (nx + 1) * (nt + 1)));
    CHECK(d.num_free() == static_cast<std::size_t>(4 * nx * (nt + 1)));
    for (int l = 0; l <= nt; ++l) {
      CHECK(d.constrained(0, l, dof_u));
      CHECK(d.constrained(nx, l, dof_ut));
      CHECK_FALSE(d.constrained(0, l, dof_ux));
      CHECK_FALSE(d.constrained(nx, l, dof_uxt));
    }
    int bw = 0;
    for (int k = 0; k < nx; ++k) {
      for (int l = 0; l < nt; ++l) {
        const auto c = d.cell_dofs(k, l);
        for (int a : c) {
          for (int b : c) {
            if (a >= 0 && b >= 0) bw = std::max(bw, std::abs(a - b));
          }
        }
      }
    }
    CHECK(bw == d.half_bandwidth());
  }
}

TEST_CASE("local shape table") {
  CHECK(local_shape(0).x_shape == 0);
  CHECK(local_shape(0).t_shape == 0);
  CHECK(local_shape(4 + dof_ux).x_shape == 3);
  CHECK(local_shape(8 + dof_ut).t_shape == 3);
  CHECK(local_shape(12 + dof_uxt).x_shape == 3);
  CHECK(local_shape(12 + dof_uxt).t_shape == 3);
}

TEST_CASE("interpolation reproduces bicubics") {
  auto dofs = dofs_for(5, 7, 1.3);
  for (const auto& u : {bubble_t(), bicubic()}) {
    const FieldPh f = interpolate(u, dofs);
    double err = 0.0;
    for (double x = 0.0; x <= 1.0; x += 1.0 / 37) {
      for (double t = 0.0; t <= 1.3; t += 1.3 / 41) {
        err = std::max(err, std::abs(f.eval(x, t) - u.u(x, t)));
        err = std::max(err, std::abs(f.eval(x, t, 1, 0) - u.ux(x, t)));
        err = std::max(err, std::abs(f.eval(x, t, 0, 1) - u.ut(x, t)));
      }
    }
    CHECK(err < 1e-12);
  }
  const FieldPh b = interpolate(
      {[](double x, double) { return x * (1 - x); }, [](double x, double) { return 1 - 2 * x; },
       [](double, double) { return 0.0; }, [](double, double) { return 0.0; }},
      dofs);
  CHECK(b.eval(0.5, 0.77) == doctest::Approx(0.25));
  CHECK(std::abs(b.eval(0.5, 0.21, 1, 0)) < 1e-13);
  CHECK(b.eval(0.31, 0.4, 2, 0) == doctest::Approx(-2.0));
}

TEST_CASE("interpolation error is fourth order") {
  double prev = 0.0;
  for (int n : {4, 8, 16}) {
    const FieldPh f = interpolate(standing(), dofs_for(n, n, 1.0));
    double err = 0.0;
    const int s = 10 * n;
    for (int i = 0; i <= s; ++i) {
      for (int j = 0; j <= s; ++j) {
        const double x = double(i) / s, t = double(j) / s;
        err = std::max(err, std::abs(f.eval(x, t) - standing().u(x, t)));
      }
    }
    if (prev > 0.0) {
      CHECK(prev / err > 12.0);
      CHECK(prev / err < 20.0);
    }
    prev = err;
  }
}

TEST_CASE("interpolation rejects fields violating the boundary constraint") {
  SmoothFunction2D u{[](double x, double t) { return x + t; }, [](double, double) { return 1.0; },
                     [](double, double) { return 1.0; }, [](double, double) { return 0.0; }};
  try {
    interpolate(u, dofs_for(3, 3, 1.0));
    FAIL("expected constraint_violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::constraint_violation);
  }
}

TEST_CASE("fields are C1 across cell faces") {
  auto dofs = dofs_for(4, 5, 1.0);
  std::vector<double> c(dofs->num_free());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::sin(1.7 * i + 0.3);
  const FieldPh f(dofs, c);
  CHECK(f.nodal(0, 2, dof_u) == 0.0);
  const double xf = 0.5;
  for (double t = 0.05; t < 1.0; t += 0.1) {
    const double lo = std::nextafter(xf, 0.0), hi = std::nextafter(xf, 1.0);
    CHECK(f.eval(lo, t) == doctest::Approx(f.eval(hi, t)).epsilon(1e-12));
    CHECK(f.eval(lo, t, 1, 0) == doctest::Approx(f.eval(hi, t, 1, 0)).epsilon(1e-10));
    CHECK(f.eval(lo, t, 0, 1) == doctest::Approx(f.eval(hi, t, 0, 1)).epsilon(1e-10));
  }
  const FieldPh zero(dofs);
  CHECK(zero.eval(0.3, 0.3, 1, 1) == 0.0);
}

TEST_CASE("boundary trace of x(1-x)t") {
  const FieldPh f = interpolate(bubble_t(), dofs_for(4, 6, 1.2));
  const TraceRaw tr = boundary_trace_x(f);
  REQUIRE(tr.times.size() == 7);
  for (std::size_t l = 0; l < tr.times.size(); ++l) {
    CHECK(tr.values[l] == doctest::Approx(-tr.times[l]));
    CHECK(tr.derivs[l] == doctest::Approx(-1.0));
  }
  const TraceRaw z = boundary_trace_x(FieldPh(dofs_for(4, 6, 1.2)));
  for (double v : z.values) CHECK(v == 0.0);
}

TEST_CASE("element moments match their closed forms") {
  for (auto [dx, dt] : {std::pair{0.1, 0.1}, std::pair{0.05, 0.11}, std::pair{1.0, 1.0}}) {
    const ElementMoments m = element_moment_oracles(dx, dt);
    for (int i = 0; i < 6; ++i) {
      CHECK(m.quadrature[i] == doctest::Approx(m.closed_form[i]).epsilon(1e-10));
    }
    CHECK(m.closed_form[0] == doctest::Approx(104.0 / 11025 * dx * dx * dx * dt));
    CHECK(m.closed_form[2] == doctest::Approx(353.0 / 198450 * dx * dx * dx * dt * dt * dt));
  }
}

TEST_CASE("field CSV round trip") {
  const FieldPh f = interpolate(bicubic(), dofs_for(3, 4, 0.8));
  std::stringstream ss;
  write_field_csv(ss, f);
  const FieldPh g = read_field_csv(ss, 0.8);
  REQUIRE(g.coeffs().size() == f.coeffs().size());
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) CHECK(g.coeffs()[i] == f.coeffs()[i]);
}

TEST_CASE("prolongation is exact") {
  auto coarse = dofs_for(3, 4, 1.0);
  std::vector<double> c(coarse->num_free());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::cos(0.9 * i);
  const FieldPh f(coarse, c);
  const FieldPh g = prolongate(f, dofs_for(6, 12, 1.0));
  for (double x = 0.0; x <= 1.0; x += 0.0625) {
    for (double t = 0.0; t <= 1.0; t += 0.07) {
      CHECK(g.eval(x, t) == doctest::Approx(f.eval(x, t)).epsilon(1e-12).scale(1.0));
      CHECK(g.eval(x, t, 1, 1) == doctest::Approx(f.eval(x, t, 1, 1)).epsilon(1e-10).scale(1.0));
    }
  }
}
