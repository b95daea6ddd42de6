#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "wavenull/error.hpp"
#include "wavenull/problem.hpp"

using namespace wavenull;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{0};
}

WeightParams reference_weights() {
  WeightParams w;
  w.M0 = 1.0 - 0.05 * 0.05 + 0.99 * 2.2 * 2.2;
  return w;
}

}  // namespace

TEST_CASE("coefficient slope is the derivative of the value") {
  const CoefficientField fields[] = {CoefficientField::constant(2.0),
                                     CoefficientField::polynomial({1.0, 0.5, -0.2, 0.1}),
                                     CoefficientField::transition(1.0, 5.0, 0.45, 0.55)};
  for (const auto& a : fields) {
    for (double x = 0.01; x < 1.0; x += 0.0371) {
      const double h = 1e-6;
      const double fd = (a.value(x + h) - a.value(x - h)) / (2 * h);
      CHECK(a.slope(x) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
    CHECK(a.min_value() > 0.0);
  }
  const auto t = CoefficientField::transition(1.0, 5.0, 0.45, 0.55);
  CHECK(t.value(0.3) == 1.0);
  CHECK(t.value(0.7) == 5.0);
  CHECK(t.max_value() == doctest::Approx(5.0));
}

TEST_CASE("non-positive coefficient is rejected") {
  CHECK(code_of([] { CoefficientField::constant(0.0); }) == ErrorCode::invalid_coefficient);
  CHECK(code_of([] { CoefficientField::polynomial({1.0, -2.0}); }) ==
        ErrorCode::invalid_coefficient);
}

TEST_CASE("admissibility") {
  const auto one = check_admissible(CoefficientField::constant(1.0), -0.05);
  CHECK(one.admissible);
  CHECK(one.lhs == doctest::Approx(-1.0));
  CHECK(one.rhs == doctest::Approx(1.0));

  CHECK(check_admissible(CoefficientField::polynomial({1.0, 3.0}), -0.05).admissible);
  CHECK(check_admissible(CoefficientField::transition(1.0, 5.0, 0.45, 0.55), -0.05).admissible);

  const auto dec = check_admissible(CoefficientField::polynomial({2.0, -1.9}), -0.05);
  CHECK_FALSE(dec.admissible);
  CHECK(dec.lhs == doctest::Approx(1.895).epsilon(1e-6));
  CHECK(dec.rhs == doctest::Approx(-0.8975).epsilon(1e-6));
  CHECK(code_of([] { beta_bounds(CoefficientField::polynomial({2.0, -1.9}), -0.05); }) ==
        ErrorCode::inadmissible_coefficient);
}

TEST_CASE("beta bounds") {
  auto [lo, hi] = beta_bounds(CoefficientField::constant(1.0), -0.05);
  CHECK(lo == doctest::Approx(-1.0));
  CHECK(hi == doctest::Approx(1.0));
  CHECK(lo < 0.99);
  CHECK(0.99 < hi);
  std::tie(lo, hi) = beta_bounds(CoefficientField::polynomial({1.0, 1.0}), -0.05);
  CHECK(lo == doctest::Approx(-1.05).epsilon(1e-8));
  CHECK(hi == doctest::Approx(1.025).epsilon(1e-8));
}

TEST_CASE("time horizon") {
  const auto a = CoefficientField::constant(1.0);
  const auto r = check_time_horizon(a, -0.05, 0.99, 2.2);
  CHECK(r.ok);
  CHECK(r.critical_T == doctest::Approx(2.0 / 0.99 * 1.05).epsilon(1e-10));
  CHECK_FALSE(check_time_horizon(a, -0.05, 0.99, r.critical_T).ok);
  CHECK_FALSE(check_time_horizon(a, -0.05, 0.99, 1.5).ok);
}

TEST_CASE("Carleman weights at the reference parameters") {
  const CarlemanWeights w(reference_weights());
  CHECK(w.phi(0.0, 2.2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.phi(0.0, -2.2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.phi(1.0, 0.0) == doctest::Approx(6.8916).epsilon(1e-4));
  CHECK(w.rho(1.0, 1.1) == doctest::Approx(0.13642).epsilon(1e-4));
  // The default shift is the minimal one.
  const CarlemanWeights d(WeightParams{});
  CHECK(d.M0() == doctest::Approx(5.7891).epsilon(1e-4));
}

TEST_CASE("weight properties") {
  const CarlemanWeights w(reference_weights());
  for (double x = 0.0; x <= 1.0; x += 0.125) {
    for (double t = 0.0; t <= 2.2; t += 0.1375) {
      CHECK(w.phi(x, 2 * t - 2.2) >= 1.0 - 1e-12);
      CHECK(w.rho(x, t) == doctest::Approx(w.rho(x, 2.2 - t)).epsilon(1e-13));
      CHECK(w.rho_inv2(x, t) == doctest::Approx(1.0 / (w.rho(x, t) * w.rho(x, t))));
    }
  }
  WeightParams flat = reference_weights();
  flat.s = 0.0;
  const CarlemanWeights one(flat);
  CHECK(one.rho(0.3, 0.7) == 1.0);
  CHECK(one.rho_inv2(0.9, 2.0) == 1.0);
}

TEST_CASE("cutoff profiles") {
  for (CutoffShape shape : {CutoffShape::root, CutoffShape::smoothstep}) {
    WeightParams p = reference_weights();
    p.cutoff = shape;
    p.delta = 0.4;
    const CarlemanWeights w(p);
    CHECK(w.theta_sq(0.0) == 0.0);
    CHECK(w.theta_sq(2.2) == 0.0);
    CHECK(w.theta_sq(1.1) == 1.0);
    CHECK(w.theta_sq(0.4) == doctest::Approx(1.0));
    CHECK(w.control_weight(0.0) == 0.0);
    CHECK(w.control_weight(2.2) == 0.0);
    CHECK(std::isinf(w.rho0(0.0)));
    CHECK(1.0 / (w.rho0(1.1) * w.rho0(1.1)) == doctest::Approx(w.control_weight(1.1)));
    for (double t = 0.01; t < 2.2; t += 0.0173) {
      CHECK(w.theta_sq(t) == doctest::Approx(w.theta_sq(2.2 - t)).epsilon(1e-12));
      CHECK(w.theta(t) * w.theta(t) == doctest::Approx(w.theta_sq(t)));
      const double h = 1e-6;
      const double fd = (w.theta_sq(t + h) - w.theta_sq(t - h)) / (2 * h);
      CHECK(w.theta_sq_d1(t) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      const double fdw = (w.control_weight(t + h) - w.control_weight(t - h)) / (2 * h);
      CHECK(w.control_weight_d1(t) == doctest::Approx(fdw).epsilon(1e-5).scale(w.control_weight(t)));
    }
  }
}

TEST_CASE("root cutoff vanishes linearly, smoothstep cubically") {
  WeightParams p = reference_weights();
  p.delta = 1.0;
  p.cutoff = CutoffShape::root;
  const CarlemanWeights r(p);
  CHECK(r.theta_sq(1e-4) / 1e-4 == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(r.theta_sq_d1(0.0) == doctest::Approx(3.0));
  CHECK(r.theta_sq_d1(2.2) == doctest::Approx(-3.0));
  p.cutoff = CutoffShape::smoothstep;
  const CarlemanWeights s(p);
  CHECK(s.theta(1e-3) / std::pow(1e-3, 3) == doctest::Approx(10.0).epsilon(1e-2));
  // theta / sqrt(t) stays bounded.
  CHECK(s.theta(1e-6) / std::sqrt(1e-6) < 1e-6);
}

TEST_CASE("default and zero cutoff width") {
  const CarlemanWeights d(reference_weights());
  CHECK(d.delta() == doctest::Approx(1.1));
  WeightParams p = reference_weights();
  p.delta = 0.0;
  const CarlemanWeights none(p);
  CHECK(none.theta_sq(0.0) == 1.0);
  CHECK(none.theta_sq_d1(0.5) == 0.0);
}

TEST_CASE("invalid weight parameters") {
  WeightParams p = reference_weights();
  p.delta = 1.2;
  CHECK(code_of([&] { CarlemanWeights w(p); }) == ErrorCode::invalid_argument);
  p = reference_weights();
  p.M0 = 1.0;
  CHECK(code_of([&] { CarlemanWeights w(p); }) == ErrorCode::invalid_argument);
  p = reference_weights();
  p.s = 1e6;
  p.lambda = 5.0;
  CHECK(code_of([&] { CarlemanWeights w(p); }) == ErrorCode::weight_overflow);
}

TEST_CASE("data functions") {
  const auto sine = DataFunction::parse("sin");
  CHECK(sine(0.5) == doctest::Approx(1.0));
  CHECK(DataFunction::parse("sin 2 3")(1.0 / 6.0) == doctest::Approx(2.0));
  const auto g = DataFunction::parse("gaussian 500 0.2");
  CHECK(g(0.2) == 1.0);
  CHECK(g(0.3) == doctest::Approx(std::exp(-5.0)));
  const auto tent = DataFunction::parse("tent");
  CHECK(tent(0.25) == 0.25);
  CHECK(tent(0.75) == 0.25);
  const auto ind = DataFunction::parse("indicator 0.5 0.7");
  CHECK(ind(0.5) == 1.0);
  CHECK(ind(0.7) == 1.0);
  CHECK(ind(0.7000001) == 0.0);
  CHECK(ind(0.4999999) == 0.0);
  CHECK(DataFunction::parse("indicator 0.2 0.5 10")(0.3) == 10.0);
  CHECK(ind.breakpoints() == std::vector<double>{0.5, 0.7});
  CHECK(DataFunction::parse("zero")(0.3) == 0.0);
  CHECK(DataFunction::parse("constant 2.5")(0.3) == 2.5);
  CHECK(code_of([] { DataFunction::parse("wiggle"); }) == ErrorCode::parse);
  CHECK(code_of([] { DataFunction::parse("indicator 0.7 0.5"); }) != ErrorCode{0});
}

TEST_CASE("problem validation") {
  ProblemConfig c;
  c.data = {DataFunction::parse("sin"), DataFunction::parse("zero")};
  CHECK_NOTHROW(c.validate());
  c.weights.T = 1.5;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::time_horizon);
  c.enforce_horizon = false;
  CHECK_NOTHROW(c.validate());
  ProblemConfig bad;
  bad.coefficient = CoefficientField::polynomial({2.0, -1.9});
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::inadmissible_coefficient);
  ProblemConfig mesh;
  mesh.nx = 0;
  CHECK(code_of([&] { mesh.validate(); }) == ErrorCode::invalid_argument);
}

TEST_CASE("matched time cells") {
  CHECK(matched_time_cells(10, 2.2) == 22);
  CHECK(matched_time_cells(80, 2.2) == 176);
  CHECK(matched_time_cells(40, 1.5) == 60);
}

TEST_CASE("sampled minimization") {
  const double m = minimize_sampled([](double x) { return (x - 0.3141) * (x - 0.3141) + 2.0; }, 0, 1);
  CHECK(m == doctest::Approx(2.0).epsilon(1e-12));
}
