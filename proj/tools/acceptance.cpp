// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed here.
// Exit status is 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wavenull/assembly.hpp"
#include "wavenull/control.hpp"
#include "wavenull/error.hpp"
#include "wavenull/experiment.hpp"
#include "wavenull/quadrature.hpp"

using namespace wavenull;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    notes.push_back(std::string(ok ? "  ok   " : "  MISS ") + what);
    pass = pass && ok;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<double> column(const RunReport& r, const std::string& case_name, const std::string& col) {
  std::vector<double> out;
  for (const ReportRow* row : r.case_rows(case_name)) out.push_back(row->get(col));
  return out;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

std::string list(const std::vector<double>& v) {
  std::ostringstream s;
  s.precision(4);
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v[i];
  return s.str();
}

RunReport run(const std::string& id, std::vector<int> ladder, int reference) {
  RunOptions o;
  o.ladder = std::move(ladder);
  o.reference = reference;
  return run_preset(make_preset(id), o);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const RunReport r = run("table1", {10, 20, 40, 80}, 0);
  const std::vector<double> target = {6.60e-2, 7.61e-2, 8.56e-2, 9.05e-2};
  const auto c22 = column(r, "T2.2", "c0h");
  for (std::size_t i = 0; i < target.size(); ++i) {
    o.require(std::abs(c22[i] / target[i] - 1.0) <= 0.15,
              fmt("T=2.2 C0h = %.4e vs %.4e (within 15%%)", c22[i], target[i]));
  }
  bool nondecreasing = true;
  for (std::size_t i = 1; i < c22.size(); ++i) nondecreasing = nondecreasing && c22[i] >= c22[i - 1];
  o.require(nondecreasing, "T=2.2 C0h nondecreasing: " + list(c22));
  const auto c15 = column(r, "T1.5", "c0h");
  for (std::size_t i = 1; i < c15.size(); ++i) {
    o.require(c15[i] / c15[i - 1] >= 3.0, fmt("T=1.5 ratio C0h(h/2)/C0h(h) = %.3f >= 3", c15[i] / c15[i - 1]));
  }
  const double secs = seconds_since(t0);
  o.require(secs <= 600.0, fmt("runtime %.1f s <= 600 s", secs));
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const RunReport r = run("smooth", {10, 20, 40, 80}, 0);
  const auto v = column(r, "smooth", "norm_v");
  const auto y = column(r, "smooth", "y_T_l2");
  const auto yt = column(r, "smooth", "yt_T_hm1");
  o.require(std::abs(v[2] / 5.43e-1 - 1.0) <= 0.10, fmt("|v_h| at 1/40 = %.4e vs 5.43e-1 (within 10%%)", v[2]));
  o.require(y[2] <= 3e-3, fmt("|y_h(T)|_L2 at 1/40 = %.3e <= 3e-3", y[2]));
  o.require(yt[2] <= 6e-3, fmt("|y_t,h(T)|_H-1 at 1/40 = %.3e <= 6e-3", yt[2]));
  o.require(strictly_decreasing(y), "|y_h(T)|_L2 strictly decreasing: " + list(y));
  o.require(strictly_decreasing(yt), "|y_t,h(T)|_H-1 strictly decreasing: " + list(yt));
  const double secs = seconds_since(t0);
  o.require(secs <= 300.0, fmt("runtime %.1f s <= 300 s", secs));
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const RunReport r = run("smooth", {10, 20, 40, 80}, 160);
  const auto ep = column(r, "smooth", "err_p");
  const auto ev = column(r, "smooth", "err_v");
  const std::vector<double> h = {0.1, 0.05, 0.025, 0.0125};
  const double rp = convergence_rate(h, ep);
  const double rv = convergence_rate(h, ev);
  o.notes.push_back("  err_p: " + list(ep));
  o.notes.push_back("  err_v: " + list(ev));
  o.require(rp >= 1.4 && rp <= 2.3, fmt("rate |p - p_h|_P = %.3f in [1.4, 2.3]", rp));
  o.require(rv >= 1.0 && rv <= 2.0, fmt("rate |v - v_h|_L2 = %.3f in [1.0, 2.0]", rv));
  const double secs = seconds_since(t0);
  o.require(secs <= 1800.0, fmt("runtime %.1f s <= 1800 s", secs));
  return o;
}

Outcome criterion4() {
  Outcome o;
  const RunReport r = run("discontinuous", {10, 20, 40, 80}, 0);
  const auto y = column(r, "discontinuous", "y_T_l2");
  const auto v = column(r, "discontinuous", "norm_v");
  o.require(strictly_decreasing(y), "|y_h(T)|_L2 strictly decreasing: " + list(y));
  o.require(y[3] <= 7e-2, fmt("|y_h(T)|_L2 at 1/80 = %.4e <= 7e-2", y[3]));
  o.require(std::abs(v[3] / 3.14e-1 - 1.0) <= 0.15, fmt("|v_h| at 1/80 = %.4e vs 3.14e-1 (within 15%%)", v[3]));
  return o;
}

// --- criterion 5 helpers ---------------------------------------------------

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

SmoothFunction2D cubic_poly() {
  // x(1-x)(1 + x t)(2 - t + t^2): cubic in x and in t, zero at x in {0,1}.
  SmoothFunction2D f;
  f.u = [](double x, double t) { return x * (1 - x) * (1 + x * t) * (2 - t + t * t); };
  f.ux = [](double x, double t) {
    const double g = 2 - t + t * t;
    return ((1 - 2 * x) * (1 + x * t) + x * (1 - x) * t) * g;
  };
  f.ut = [](double x, double t) {
    return x * (1 - x) * (x * (2 - t + t * t) + (1 + x * t) * (-1 + 2 * t));
  };
  f.uxt = [](double x, double t) {
    const double g = 2 - t + t * t, gt = -1 + 2 * t;
    const double a = (1 - 2 * x) * (1 + x * t) + x * (1 - x) * t;
    const double at = (1 - 2 * x) * x + x * (1 - x);
    return at * g + a * gt;
  };
  return f;
}

Outcome criterion5() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();

  // (a) element moments
  double worst = 0.0;
  for (auto [dx, dt] : {std::pair{0.1, 0.1}, {0.05, 0.11}, {1.0 / 3.0, 0.25}}) {
    const ElementMoments m = element_moment_oracles(dx, dt);
    for (std::size_t i = 0; i < m.closed_form.size(); ++i) worst = std::max(worst, rel_diff(m.quadrature[i], m.closed_form[i]));
  }
  o.require(worst <= 1e-12, fmt("(a) element moment identities, max rel. error %.2e <= 1e-12", worst));

  // (b) interpolation reproduces bicubics; C^1 across cell edges
  {
    auto dofs = std::make_shared<const DofMap>(SpaceTimeMesh(5, 4, 1.3));
    const SmoothFunction2D f = cubic_poly();
    const FieldPh p = interpolate(f, dofs);
    double err = 0.0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.0, 1.0), ut(0.0, 1.3);
    for (int i = 0; i < 400; ++i) {
      const double x = ux(rng), t = ut(rng);
      err = std::max(err, std::abs(p.eval(x, t) - f.u(x, t)));
      err = std::max(err, std::abs(p.eval(x, t, 1, 0) - f.ux(x, t)));
    }
    // C^1 across interior edges for a field with random DOFs: one-sided
    // first derivatives from the two neighbouring cells must agree.
    std::vector<double> c(dofs->num_free());
    std::normal_distribution<double> n01;
    for (double& v : c) v = n01(rng);
    const FieldPh r(dofs, c);
    double edge = 0.0;
    auto compare = [&](double a, double b) {
      edge = std::max(edge, std::abs(a - b) / std::max(1.0, std::abs(b)));
    };
    for (int k = 1; k < 5; ++k) {
      const double x = k / 5.0;
      const double xl = std::nextafter(x, 0.0);
      for (int s = 0; s < 20; ++s) {
        const double t = ut(rng);
        compare(r.eval(xl, t, 1, 0), r.eval(x, t, 1, 0));
        compare(r.eval(xl, t, 0, 1), r.eval(x, t, 0, 1));
      }
    }
    for (int l = 1; l < 4; ++l) {
      const double t = l * 1.3 / 4.0;
      const double tl = std::nextafter(t, 0.0);
      for (int s = 0; s < 20; ++s) {
        const double x = ux(rng);
        compare(r.eval(x, tl, 1, 0), r.eval(x, t, 1, 0));
        compare(r.eval(x, tl, 0, 1), r.eval(x, t, 0, 1));
      }
    }
    o.require(err <= 1e-12, fmt("(b) bicubic reproduction, max error %.2e <= 1e-12", err));
    o.require(edge <= 1e-12, fmt("(b) C1 conformity, max derivative jump across edges %.2e <= 1e-12", edge));
  }

  // (c) symmetry and Cholesky for every preset case
  {
    double asym = 0.0;
    bool chol = true;
    std::string failed;
    for (const auto& id : preset_ids()) {
      for (const auto& [name, base] : make_preset(id).cases) {
        ProblemConfig c = base;
        c.nx = 10;
        c.nt = matched_time_cells(10, c.weights.T);
        auto dofs = std::make_shared<const DofMap>(SpaceTimeMesh(c.nx, c.nt, c.weights.T));
        const BandedSpdMatrix m = assemble_M(*dofs, c, c.mode, c.quad_order);
        std::mt19937_64 rng(11);
        std::normal_distribution<double> n01;
        std::vector<double> a(dofs->num_free()), b(dofs->num_free());
        for (auto& v : a) v = n01(rng);
        for (auto& v : b) v = n01(rng);
        const FieldPh fa(dofs, a), fb(dofs, b);
        const double ab = energy_form(fa, fb, c, c.mode, c.quad_order);
        const double ba = energy_form(fb, fa, c, c.mode, c.quad_order);
        const std::vector<double> mb = m.multiply(b);
        double banded = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) banded += a[i] * mb[i];
        asym = std::max({asym, rel_diff(ab, ba), rel_diff(ab, banded)});
        try {
          (void)CholeskyFactor::factorize(m);
        } catch (const Error&) {
          chol = false;
          failed += " " + id + "/" + name;
        }
      }
    }
    o.require(asym <= 1e-12, fmt("(c) M symmetric (matrix-free vs banded, both orders), rel. %.2e <= 1e-12", asym));
    o.require(chol, "(c) Cholesky succeeds for every preset" + (failed.empty() ? std::string() : ":" + failed));
  }

  // (d) Galerkin residual
  {
    double worst_res = 0.0;
    for (int nx : {10, 20, 40, 80}) {
      ProblemConfig c = make_preset("smooth").cases.front().second;
      c.nx = nx;
      c.nt = matched_time_cells(nx, c.weights.T);
      worst_res = std::max(worst_res, solve_discrete(c).galerkin_residual);
    }
    o.require(worst_res <= 1e-9, fmt("(d) Galerkin residual (smooth, up to 1/80) %.2e <= 1e-9", worst_res));
  }

  // (e) standing wave, dt halving
  {
    ProblemConfig c;
    c.coefficient = CoefficientField::constant(1.0);
    c.potential = PotentialField::constant(0.0);
    c.data = {DataFunction::parse("sin"), DataFunction::parse("zero")};
    c.weights.T = 2.2;
    c.nx = 20;
    c.nt = matched_time_cells(20, 2.2);
    auto err_at = [&](int steps) {
      ForwardOptions fo;
      fo.auto_cfl = false;
      fo.total_steps = steps;
      fo.interpolated_data = false;
      const WaveTrajectory tr = forward_solve_free(c, fo);
      double e = 0.0;
      for (int k = 0; k <= c.nx; ++k) {
        const double x = static_cast<double>(k) / c.nx;
        e = std::max(e, std::abs(tr.states.back().eval(x, 0) -
                                 std::sin(std::numbers::pi * x) * std::cos(std::numbers::pi * c.weights.T)));
      }
      return e;
    };
    const double e1 = err_at(200), e2 = err_at(400);
    const double ratio = e1 / e2;
    o.require(ratio >= 3.4 && ratio <= 4.6, fmt("(e) standing-wave error ratio %.3f in [3.4, 4.6] (errors %.2e, %.2e)", ratio, e1, e2));
  }

  // (f) weight symmetry and phi >= 1
  {
    const CarlemanWeights w(WeightParams{});
    double asym = 0.0, phi_min = 1e300;
    const double T = w.T();
    for (int i = 0; i <= 50; ++i) {
      for (int j = 0; j <= 110; ++j) {
        const double x = i / 50.0, t = T * j / 110.0;
        asym = std::max(asym, rel_diff(w.rho(x, t), w.rho(x, T - t)));
        phi_min = std::min(phi_min, w.phi(x, 2.0 * t - T));
      }
    }
    o.require(asym <= 1e-12, fmt("(f) rho(x,t) = rho(x,T-t), max rel. difference %.2e <= 1e-12", asym));
    o.require(phi_min >= 1.0 - 1e-12, fmt("(f) min phi on the grid %.6f >= 1", phi_min));
  }

  // (g) duality pairing against the closed-form Poisson inverse
  {
    double worst_g = 0.0;
    for (int nx : {8, 20, 64}) {
      const std::vector<double> f = nodal_samples(DataFunction::parse("sin 1 2"), nx);
      const PoissonInverse1D w(f);
      auto q = [](double x) { return x * (1 - x) * std::exp(x); };
      auto dq = [](double x) { return ((1 - 2 * x) + x * (1 - x)) * std::exp(x); };
      const GaussRule g = composite_gauss(0.0, 1.0, 4 * nx, 8);
      double lhs = 0.0, rhs = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.points[i];
        const int k = std::min(static_cast<int>(x * nx), nx - 1);
        const double c = x * nx - k;
        const double pif = (1 - c) * f[k] + c * f[k + 1];
        lhs += g.weights[i] * w.slope(x) * dq(x);
        rhs += g.weights[i] * pif * q(x);
      }
      worst_g = std::max(worst_g, std::abs(lhs - rhs));
    }
    o.require(worst_g <= 1e-8, fmt("(g) <y1, q> pairing vs int y1 q, max error %.2e <= 1e-8", worst_g));
  }

  const double secs = seconds_since(t0);
  o.require(secs <= 120.0, fmt("runtime %.1f s <= 120 s", secs));
  return o;
}

Outcome criterion6() {
  Outcome o;
  const RunReport r = run("varcoef", {10, 20, 40, 80}, 0);
  const auto c = column(r, "varcoef", "c0h");
  const auto y = column(r, "varcoef", "y_T_l2");
  bool finite = true;
  for (double v : c) finite = finite && std::isfinite(v) && v > 0.0;
  o.require(finite, "pipeline completes with finite C0h on every mesh: " + list(c));
  const double spread = *std::max_element(c.begin(), c.end()) / *std::min_element(c.begin(), c.end());
  o.require(spread <= 2.0, fmt("C0h bounded: max/min over the ladder %.3f <= 2", spread));
  o.require(c.back() / c[c.size() - 2] <= 1.5, fmt("C0h bounded: last refinement ratio %.3f <= 1.5", c.back() / c[c.size() - 2]));
  o.require(strictly_decreasing(y), "|y_h(T)|_L2 decreasing: " + list(y));
  o.require(y.back() <= 2e-2, fmt("|y_h(T)|_L2 at 1/80 = %.4e <= 2e-2", y.back()));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"observability constants, a = b = 1", criterion1},
      {"smooth case control and final state", criterion2},
      {"convergence rates against the 1/160 reference", criterion3},
      {"discontinuous data robustness", criterion4},
      {"property suite", criterion5},
      {"non-constant coefficient", criterion6},
  };
  int failures = 0;
  std::vector<std::string> summary;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes.push_back(std::string("  error: ") + e.what());
    }
    std::printf("[criterion %zu] %s (%.1f s)\n", i + 1, criteria[i].first, seconds_since(t0));
    for (const auto& n : o.notes) std::printf("%s\n", n.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
    summary.push_back(std::string("criterion ") + std::to_string(i + 1) + ": " + (o.pass ? "PASS" : "FAIL"));
  }
  std::printf("\n");
  for (const auto& s : summary) std::printf("%s\n", s.c_str());
  return failures == 0 ? 0 : 1;
}
