#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "wavenull/assembly.hpp"
#include "wavenull/control.hpp"
#include "wavenull/error.hpp"
#include "wavenull/experiment.hpp"

using namespace wavenull;

namespace {

constexpr double pi = std::numbers::pi;

ProblemConfig wave_config(int nx, double T) {
  ProblemConfig c;
  c.coefficient = CoefficientField::constant(1.0);
  c.potential = PotentialField::constant(0.0);
  c.data = {DataFunction::parse("sin"), DataFunction::parse("zero")};
  c.weights.T = T;
  c.nx = nx;
  c.nt = matched_time_cells(nx, T);
  c.enforce_horizon = false;
  return c;
}

std::shared_ptr<const DofMap> dofs_of(const ProblemConfig& c) {
  return std::make_shared<const DofMap>(SpaceTimeMesh(c.nx, c.nt, c.weights.T));
}

SpatialField nodal_field(int nx, auto f, auto df) {
  SpatialField s;
  s.nx = nx;
  for (int k = 0; k <= nx; ++k) {
    const double x = double(k) / nx;
    s.dofs.push_back(f(x));
    s.dofs.push_back(df(x));
  }
  return s;
}

}  // namespace

TEST_CASE("Hermite control sampling") {
  ControlTrace tr;
  tr.times = {0.0, 0.5, 1.0};
  tr.v = {0.0, 0.5, 1.0};
  tr.vt = {1.0, 1.0, 1.0};
  CHECK(sample_control(tr, 0, 0.0) == 0.0);
  CHECK(sample_control(tr, 0, 1.0) == 0.5);
  CHECK(sample_control(tr, 1, 0.5) == doctest::Approx(0.75));
  CHECK(tr(0.3) == doctest::Approx(0.3));
  CHECK(tr(1.0) == doctest::Approx(1.0));
  CHECK(norm_l2_control(tr) == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK_THROWS_AS(sample_control(tr, 2, 0.5), Error);
}

TEST_CASE("control from a field") {
  ProblemConfig c = wave_config(4, 2.2);
  auto d = dofs_of(c);
  const ControlTrace zero = extract_control(FieldPh(d), c);
  for (double v : zero.v) CHECK(v == 0.0);

  // p = x(1-x) t: p_x(1,t) = -t, so v = theta^2 rho(1,t)^{-2} t.
  const FieldPh p = interpolate({[](double x, double t) { return x * (1 - x) * t; },
                                 [](double x, double t) { return (1 - 2 * x) * t; },
                                 [](double x, double) { return x * (1 - x); },
                                 [](double x, double) { return 1 - 2 * x; }},
                                d);
  const ControlTrace tr = extract_control(p, c);
  const CarlemanWeights w(c.weights);
  CHECK(tr.v.front() == 0.0);
  CHECK(tr.v.back() == 0.0);
  for (std::size_t l = 0; l < tr.times.size(); ++l) {
    CHECK(tr.v[l] == doctest::Approx(w.control_weight(tr.times[l]) * tr.times[l]));
    CHECK(tr.raw.values[l] == doctest::Approx(-tr.times[l]));
  }
}

TEST_CASE("projection onto Z_h") {
  const SpatialField z = l2_project_y0(DataFunction::parse("zero"), 8);
  for (double v : z.dofs) CHECK(v == 0.0);
  double prev = 0.0;
  for (int nx : {10, 20, 40}) {
    const SpatialField s = l2_project_y0(DataFunction::parse("sin"), nx);
    double e2 = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) / n;
      e2 += std::pow(s.eval(x) - std::sin(pi * x), 2) / n;
    }
    const double e = std::sqrt(e2);
    if (prev > 0.0) CHECK(prev / e == doctest::Approx(16.0).epsilon(0.1));
    prev = e;
  }
  const SpatialField ind = l2_project_y0(DataFunction::parse("indicator 0.5 0.7"), 13);
  double mean = 0.0;
  const int n = 130000;
  for (int i = 0; i < n; ++i) mean += ind.eval((i + 0.5) / n) / n;
  CHECK(mean == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("spatial norms") {
  const int nx = 64;
  const SpatialField one = nodal_field(nx, [](double) { return 1.0; }, [](double) { return 0.0; });
  CHECK(norm_l2(one) == doctest::Approx(1.0));
  CHECK(norm_hminus1(one) == doctest::Approx(1.0 / (2 * std::sqrt(3.0))).epsilon(1e-10));
  const SpatialField s = nodal_field(nx, [](double x) { return std::sin(pi * x); },
                                     [](double x) { return pi * std::cos(pi * x); });
  CHECK(norm_l2(s) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
  CHECK(norm_hminus1(s) == doctest::Approx(1.0 / (pi * std::sqrt(2.0))).epsilon(1e-6));
  const SpatialField z = nodal_field(nx, [](double) { return 0.0; }, [](double) { return 0.0; });
  CHECK(norm_hminus1(z) == 0.0);
}

TEST_CASE("free wave with zero data stays at rest") {
  ProblemConfig c = wave_config(8, 2.2);
  c.data = {DataFunction::parse("zero"), DataFunction::parse("zero")};
  const WaveTrajectory tr = forward_solve_free(c, {});
  for (const auto& s : tr.states) {
    for (double v : s.dofs) CHECK(v == 0.0);
  }
  CHECK(norm_l2_final(tr) == 0.0);
  CHECK(norm_hminus1_final_velocity(tr) == 0.0);
}

TEST_CASE("standing wave converges at second order in time") {
  const ProblemConfig c = wave_config(20, 2.2);
  auto err_at = [&](int steps) {
    ForwardOptions fo;
    fo.auto_cfl = false;
    fo.total_steps = steps;
    fo.interpolated_data = false;
    const WaveTrajectory tr = forward_solve_free(c, fo);
    CHECK(tr.times.back() == doctest::Approx(2.2));
    double e = 0.0;
    for (int k = 0; k <= c.nx; ++k) {
      const double x = double(k) / c.nx;
      e = std::max(e, std::abs(tr.states.back().eval(x) - std::sin(pi * x) * std::cos(pi * 2.2)));
    }
    return e;
  };
  const double ratio = err_at(200) / err_at(400);
  CHECK(ratio > 3.4);
  CHECK(ratio < 4.6);
}

TEST_CASE("free wave energy is conserved up to the first-order velocity measure") {
  ProblemConfig c = wave_config(16, 2.2);
  c.data = {DataFunction::parse("gaussian 100 0.5"), DataFunction::parse("zero")};
  auto spread = [&](int substeps) {
    ForwardOptions fo;
    fo.substeps = substeps;
    const WaveTrajectory tr = forward_solve_free(c, fo);
    double lo = 1e300, hi = 0.0;
    for (std::size_t n = 1; n < tr.states.size(); ++n) {
      const double e = wave_energy(tr, c.coefficient, n);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    return (hi - lo) / hi;
  };
  const double s16 = spread(16), s32 = spread(32);
  CHECK(s32 < 0.03);
  CHECK(s16 / s32 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("stability limit") {
  CHECK(forward_dt_limit(0.1, 1.0) == doctest::Approx(0.1 * std::sqrt(4.0 / 42.0)).epsilon(1e-3));
  CHECK(forward_dt_limit(0.1, 4.0) == doctest::Approx(forward_dt_limit(0.1, 1.0) / 2));
  ProblemConfig c = wave_config(8, 2.2);
  ForwardOptions fo;
  fo.auto_cfl = false;
  fo.total_steps = 10;
  try {
    forward_solve_free(c, fo);
    FAIL("expected cfl");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::cfl);
  }
}

TEST_CASE("discrete control drives the smooth state near rest") {
  ProblemConfig c = wave_config(10, 2.2);
  c.potential = PotentialField::constant(1.0);
  c.enforce_horizon = true;
  const DiscreteSolution sol = solve_discrete(c);
  CHECK(sol.galerkin_residual < 1e-10);
  const ControlTrace tr = extract_control(sol.p, c);
  const WaveTrajectory free = forward_solve_free(c, {});
  const WaveTrajectory ctrl = forward_solve(c, tr);
  CHECK(norm_l2_final(ctrl) < 0.05 * norm_l2_final(free) + 0.02);

  // Cost identity in exact mode: J = 1/2 p^T M p.
  c.mode = WeightMode::exact;
  const DiscreteSolution ex = solve_discrete(c);
  CHECK(eval_cost_field(ex.p, c) == doctest::Approx(0.5 * ex.norm_p * ex.norm_p).epsilon(0.05));

  // The state recovered from p matches y = -W L p at a node.
  const StateGrid g = extract_state(sol.p, c, 10, 22);
  CHECK(g.y.size() == 11u * 23u);
  CHECK(g.y[5 * 11 + 3] == doctest::Approx(state_at(sol.p, c, g.xs[3], g.ts[5])));

  std::ostringstream out;
  write_control_csv(out, tr);
  CHECK(out.str().rfind("t,", 0) == 0);
}
