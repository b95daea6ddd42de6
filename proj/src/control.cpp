#include "wavenull/control.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "wavenull/assembly.hpp"
#include "wavenull/error.hpp"
#include "wavenull/linalg.hpp"
#include "wavenull/quadrature.hpp"

namespace wavenull {

namespace {

double hermite_blend(double y0, double d0, double y1, double d1, double dt, double c) {
  const HermiteValues h = hermite_all(c, dt);
  return y0 * h.v[0] + y1 * h.v[1] + d0 * h.v[2] + d1 * h.v[3];
}

int locate_interval(const std::vector<double>& times, double t) {
  const int n = static_cast<int>(times.size()) - 1;
  if (!(t >= times.front() - 1e-12 && t <= times.back() + 1e-12)) {
    std::ostringstream msg;
    msg << "time " << t << " outside [" << times.front() << ", " << times.back() << "]";
    throw Error(ErrorCode::domain, msg.str());
  }
  const double dt = (times.back() - times.front()) / n;
  return std::clamp(static_cast<int>(std::floor((t - times.front()) / dt)), 0, n - 1);
}

double raw_px(const TraceRaw& raw, double t) {
  const int j = locate_interval(raw.times, t);
  const double dt = raw.times[j + 1] - raw.times[j];
  return hermite_blend(raw.values[j], raw.derivs[j], raw.values[j + 1], raw.derivs[j + 1], dt,
                       std::clamp((t - raw.times[j]) / dt, 0.0, 1.0));
}

}  // namespace

double ControlTrace::operator()(double t) const {
  const int j = locate_interval(times, t);
  return sample_control(*this, j, std::clamp((t - times[j]) / (times[j + 1] - times[j]), 0.0, 1.0));
}

ControlTrace extract_control(const FieldPh& p, const ProblemConfig& config) {
  const CarlemanWeights w(config.weights);
  ControlTrace tr;
  tr.raw = boundary_trace_x(p);
  const double a1 = config.coefficient.value(1.0);
  const std::size_t n = tr.raw.times.size();
  tr.times = tr.raw.times;
  tr.v.resize(n);
  tr.vt.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    const double t = tr.times[l];
    const double w0 = w.control_weight(t);
    tr.v[l] = -w0 * a1 * tr.raw.values[l];
    tr.vt[l] = -(w.control_weight_d1(t) * tr.raw.values[l] + w0 * tr.raw.derivs[l]) * a1;
  }
  return tr;
}

double sample_control(const ControlTrace& trace, int j, double theta) {
  if (j < 0 || j >= trace.intervals()) {
    throw Error(ErrorCode::invalid_argument, "sample_control: interval index out of range");
  }
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "sample_control: theta must lie in [0,1]");
  }
  const double dt = trace.times[j + 1] - trace.times[j];
  return hermite_blend(trace.v[j], trace.vt[j], trace.v[j + 1], trace.vt[j + 1], dt, theta);
}

double norm_l2_control(const ControlTrace& trace) {
  const GaussRule& g = gauss_unit(5);
  double sum = 0.0;
  for (int j = 0; j < trace.intervals(); ++j) {
    const double dt = trace.times[j + 1] - trace.times[j];
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double v = sample_control(trace, j, g.points[q]);
      sum += g.weights[q] * dt * v * v;
    }
  }
  return std::sqrt(sum);
}

// ---------------------------------------------------------------------------

namespace {

double state_with(const FieldPh& p, const ProblemConfig& config, const WeightField& wf, double x,
                  double t) {
  const SpaceTimeMesh& m = p.mesh();
  const int k = m.cell_x(x);
  const int l = m.cell_t(t);
  PointJet j;
  j.v = p.eval(x, t, 0, 0);
  j.x = p.eval(x, t, 1, 0);
  j.xx = p.eval(x, t, 2, 0);
  j.tt = p.eval(x, t, 0, 2);
  const double weight = wf.interior(k, l, (x - m.x(k)) / m.dx(), (t - m.t(l)) / m.dt());
  return -weight * apply_L(j, config.coefficient, config.potential, x, t);
}

}  // namespace

double state_at(const FieldPh& p, const ProblemConfig& config, double x, double t) {
  const CarlemanWeights w(config.weights);
  const WeightField wf(w, p.mesh(), config.mode);
  return state_with(p, config, wf, x, t);
}

StateGrid extract_state(const FieldPh& p, const ProblemConfig& config, int nsx, int nst) {
  if (nsx < 1 || nst < 1) throw Error(ErrorCode::invalid_argument, "extract_state: empty grid");
  const CarlemanWeights w(config.weights);
  const WeightField wf(w, p.mesh(), config.mode);
  StateGrid g;
  const double T = p.mesh().T;
  for (int i = 0; i <= nsx; ++i) g.xs.push_back(static_cast<double>(i) / nsx);
  for (int l = 0; l <= nst; ++l) g.ts.push_back(T * l / nst);
  g.y.reserve(g.xs.size() * g.ts.size());
  for (double t : g.ts) {
    for (double x : g.xs) g.y.push_back(state_with(p, config, wf, x, t));
  }
  return g;
}

// ---------------------------------------------------------------------------

double SpatialField::eval(double x, int deriv) const {
  const int k = std::clamp(static_cast<int>(std::floor(x * nx)), 0, nx - 1);
  const double dx = 1.0 / nx;
  const HermiteValues h = hermite_all((x - k * dx) / dx, dx);
  const auto& b = deriv == 0 ? h.v : (deriv == 1 ? h.d1 : h.d2);
  return dofs[2 * k] * b[0] + dofs[2 * k + 2] * b[1] + dofs[2 * k + 1] * b[2] +
         dofs[2 * k + 3] * b[3];
}

namespace {

/// Global index of local Hermite shape i on interval k.
int zh_index(int k, int i) { return i < 2 ? 2 * (k + i) : 2 * (k + i - 2) + 1; }

/// int f(x) H_i(x) dx against every Z_h basis function, with each interval
/// split further at the breakpoints of f.
std::vector<double> zh_load(const std::function<double(double)>& f, const std::vector<double>& breaks,
                            int nx) {
  std::vector<double> b(2 * (nx + 1), 0.0);
  const double dx = 1.0 / nx;
  for (int k = 0; k < nx; ++k) {
    const double lo = k * dx;
    const double hi = lo + dx;
    std::vector<double> cuts{lo};
    for (double c : breaks) {
      if (c > lo && c < hi) cuts.push_back(c);
    }
    cuts.push_back(hi);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const GaussRule rule = composite_gauss(cuts[s], cuts[s + 1], 40, 5);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double x = rule.points[q];
        const double fx = rule.weights[q] * f(x);
        const HermiteValues h = hermite_all((x - lo) / dx, dx);
        for (int i = 0; i < 4; ++i) b[zh_index(k, i)] += fx * h.v[i];
      }
    }
  }
  return b;
}

std::vector<double> zh_load(const DataFunction& f, int nx) {
  return zh_load([&](double x) { return f(x); }, f.breakpoints(), nx);
}

/// Load of the piecewise linear nodal interpolant of f on the nx-mesh.
std::vector<double> zh_load_interpolant(const DataFunction& f, int nx) {
  std::vector<double> nodes(nx + 1);
  for (int k = 0; k <= nx; ++k) nodes[k] = f(static_cast<double>(k) / nx);
  auto pi = [&](double x) {
    const int k = std::clamp(static_cast<int>(std::floor(x * nx)), 0, nx - 1);
    const double c = x * nx - k;
    return (1.0 - c) * nodes[k] + c * nodes[k + 1];
  };
  return zh_load(pi, {}, nx);
}

BandedSpdMatrix zh_form(int nx, const std::function<double(double)>& coef, bool derivative) {
  BandedSpdMatrix m(2 * (nx + 1), 3);
  const GaussRule& g = gauss_unit(5);
  const double dx = 1.0 / nx;
  for (int k = 0; k < nx; ++k) {
    double ke[4][4] = {};
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double x = (k + g.points[q]) * dx;
      const HermiteValues h = hermite_all(g.points[q], dx);
      const auto& b = derivative ? h.d1 : h.v;
      const double w = g.weights[q] * dx * coef(x);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) ke[i][j] += w * b[i] * b[j];
      }
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const int gi = zh_index(k, i);
        const int gj = zh_index(k, j);
        if (gi >= gj) m.add(gi, gj, ke[i][j]);
      }
    }
  }
  return m;
}

/// Full index of the i-th DOF left free by the Dirichlet conditions (the
/// endpoint values 0 and 2 nx are removed).
int zh_free(int i, int nx) { return i < 2 * nx - 1 ? i + 1 : 2 * nx + 1; }

BandedSpdMatrix interior_block(const BandedSpdMatrix& m, int nx) {
  const int n = 2 * nx;
  BandedSpdMatrix out(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - 3); j <= i; ++j) out.set(i, j, m(zh_free(i, nx), zh_free(j, nx)));
  }
  return out;
}

class ZhSystem {
 public:
  ZhSystem(const ProblemConfig& config, int nx)
      : nx_(nx),
        mass_(zh_form(nx, [](double) { return 1.0; }, false)),
        stiff_(zh_form(nx, [&](double x) { return config.coefficient.value(x); }, true)),
        factor_(CholeskyFactor::factorize(interior_block(mass_, nx))),
        potential_(config.potential) {}

  const BandedSpdMatrix& mass() const { return mass_; }
  const BandedSpdMatrix& stiff() const { return stiff_; }

  /// (K + B(t)) y.
  std::vector<double> apply_operator(const std::vector<double>& y, double t) const {
    std::vector<double> r = stiff_.multiply(y);
    if (potential_.is_constant()) {
      const double b = potential_(0.0, t);
      if (b != 0.0) {
        const std::vector<double> my = mass_.multiply(y);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += b * my[i];
      }
    } else {
      const BandedSpdMatrix bm = zh_form(nx_, [&](double x) { return potential_(x, t); }, false);
      const std::vector<double> by = bm.multiply(y);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += by[i];
    }
    return r;
  }

  /// Solves M y = r on the interior DOFs with y(0) = 0, y(1) = right.
  std::vector<double> solve_lifted(const std::vector<double>& r, double right) const {
    const int last = 2 * nx_;
    std::vector<double> rf(2 * nx_);
    for (int i = 0; i < 2 * nx_; ++i) {
      const int fi = zh_free(i, nx_);
      rf[i] = r[fi] - mass_(fi, last) * right;
    }
    factor_.solve_in_place(rf);
    std::vector<double> y(2 * (nx_ + 1), 0.0);
    for (int i = 0; i < 2 * nx_; ++i) y[zh_free(i, nx_)] = rf[i];
    y[last] = right;
    return y;
  }

 private:
  int nx_;
  BandedSpdMatrix mass_;
  BandedSpdMatrix stiff_;
  CholeskyFactor factor_;
  PotentialField potential_;
};

WaveTrajectory run_scheme(const ProblemConfig& config, const ControlTrace* trace,
                          const ForwardOptions& options) {
  const int nx = config.nx;
  const double T = config.weights.T;
  int nt = trace ? trace->intervals() : config.nt;
  int substeps = std::max(1, options.substeps);
  int steps = options.total_steps > 0 ? options.total_steps : nt * substeps;
  if (options.auto_cfl && options.total_steps <= 0) {
    const double limit = 0.9 * forward_dt_limit(1.0 / nx, config.coefficient.max_value());
    while (T / steps > limit) {
      ++substeps;
      steps = nt * substeps;
    }
  }
  const double dt = T / steps;

  auto boundary = [&](int n) -> double {
    if (!trace) return 0.0;
    if (options.total_steps > 0) return (*trace)(std::min(T, n * dt));
    const int j = std::min(n / substeps, nt - 1);
    return sample_control(*trace, j, static_cast<double>(n - j * substeps) / substeps);
  };

  const ZhSystem sys(config, nx);
  const BandedSpdMatrix& M = sys.mass();
  const std::size_t n_all = 2 * (nx + 1);

  WaveTrajectory traj;
  traj.dt = dt;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);

  // Constrained projection of y0 (endpoint values pinned to the lift).
  auto load = [&](const DataFunction& f) {
    return options.interpolated_data ? zh_load_interpolant(f, nx) : zh_load(f, nx);
  };
  std::vector<double> y0 = sys.solve_lifted(load(config.data.y0), boundary(0));
  const std::vector<double> g1 = load(config.data.y1);
  std::vector<double> r = M.multiply(y0);
  {
    const std::vector<double> ky = sys.apply_operator(y0, 0.0);
    for (std::size_t i = 0; i < n_all; ++i) r[i] += dt * g1[i] - 0.5 * dt * dt * ky[i];
  }
  std::vector<double> y1 = sys.solve_lifted(r, boundary(1));
  traj.times.push_back(0.0);
  traj.states.push_back({nx, y0});
  traj.times.push_back(dt);
  traj.states.push_back({nx, y1});

  auto energy = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> u(n_all);
    for (std::size_t i = 0; i < n_all; ++i) u[i] = (b[i] - a[i]) / dt;
    return 0.5 * M.quadratic_form(u) + 0.5 * sys.stiff().quadratic_form(b);
  };
  double control_scale = 0.0;
  if (trace) {
    const double amax = config.coefficient.max_value();
    for (std::size_t l = 0; l < trace->v.size(); ++l) {
      control_scale = std::max(control_scale,
                               0.5 * (trace->vt[l] * trace->vt[l] + amax * trace->v[l] * trace->v[l]));
    }
  }
  const double baseline = std::max(energy(y0, y1), control_scale);

  for (int n = 2; n <= steps; ++n) {
    const std::vector<double>& ym1 = traj.states[n - 1].dofs;
    const std::vector<double>& ym2 = traj.states[n - 2].dofs;
    const std::vector<double> my = M.multiply(ym1);
    const std::vector<double> mz = M.multiply(ym2);
    const std::vector<double> ky = sys.apply_operator(ym1, (n - 1) * dt);
    for (std::size_t i = 0; i < n_all; ++i) r[i] = 2.0 * my[i] - mz[i] - dt * dt * ky[i];
    std::vector<double> yn = sys.solve_lifted(r, boundary(n));
    const double e = energy(ym1, yn);
    if (!std::isfinite(e) || (e > 10.0 * baseline && e > 1e-200)) {
      std::ostringstream msg;
      msg << "forward solve unstable at step " << n << " (energy " << e << ", baseline "
          << baseline << "); reduce the time step (dt_f = " << dt << ")";
      throw Error(ErrorCode::cfl, msg.str());
    }
    traj.times.push_back(n * dt);
    traj.states.push_back({nx, std::move(yn)});
  }
  return traj;
}

}  // namespace

SpatialField l2_project_y0(const DataFunction& y0, int nx) {
  if (nx < 1) throw Error(ErrorCode::invalid_argument, "l2_project_y0: nx must be positive");
  const BandedSpdMatrix m = zh_form(nx, [](double) { return 1.0; }, false);
  const CholeskyFactor f = CholeskyFactor::factorize(m);
  return {nx, f.solve(zh_load(y0, nx))};
}

double forward_dt_limit(double dx, double a_max) {
  // 2 / sqrt(lambda_max(M^{-1}K)) with lambda_max = 42 a / dx^2.
  return 2.0 * dx / std::sqrt(42.0 * a_max);
}

WaveTrajectory forward_solve(const ProblemConfig& config, const ControlTrace& trace,
                             const ForwardOptions& options) {
  return run_scheme(config, &trace, options);
}

WaveTrajectory forward_solve_free(const ProblemConfig& config, const ForwardOptions& options) {
  return run_scheme(config, nullptr, options);
}

// ---------------------------------------------------------------------------

double norm_l2(const SpatialField& y) {
  const GaussRule& g = gauss_unit(5);
  const double dx = 1.0 / y.nx;
  double sum = 0.0;
  for (int k = 0; k < y.nx; ++k) {
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double v = y.eval((k + g.points[q]) * dx);
      sum += g.weights[q] * dx * v * v;
    }
  }
  return std::sqrt(sum);
}

double norm_l2_final(const WaveTrajectory& traj) { return norm_l2(traj.states.back()); }

double norm_hminus1(const SpatialField& gf) {
  // F = int_0^x g is piecewise quartic; w' = C - F with C = int_0^1 F.
  const int nx = gf.nx;
  const double dx = 1.0 / nx;
  auto antideriv = [&](int k, double s) {
    const double a0 = s - s * s * s + 0.5 * s * s * s * s;
    const double a1 = s * s * s - 0.5 * s * s * s * s;
    const double a2 = dx * (0.5 * s * s - 2.0 * s * s * s / 3.0 + 0.25 * s * s * s * s);
    const double a3 = dx * (0.25 * s * s * s * s - s * s * s / 3.0);
    return dx * (gf.dofs[2 * k] * a0 + gf.dofs[2 * k + 2] * a1 + gf.dofs[2 * k + 1] * a2 +
                 gf.dofs[2 * k + 3] * a3);
  };
  const GaussRule& g = gauss_unit(5);
  std::vector<double> F0(nx + 1, 0.0);
  for (int k = 0; k < nx; ++k) F0[k + 1] = F0[k] + antideriv(k, 1.0);
  double C = 0.0;
  for (int k = 0; k < nx; ++k) {
    for (std::size_t q = 0; q < g.size(); ++q) C += g.weights[q] * dx * (F0[k] + antideriv(k, g.points[q]));
  }
  double sum = 0.0;
  for (int k = 0; k < nx; ++k) {
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double d = C - (F0[k] + antideriv(k, g.points[q]));
      sum += g.weights[q] * dx * d * d;
    }
  }
  return std::sqrt(sum);
}

double norm_hminus1_final_velocity(const WaveTrajectory& traj) {
  const std::size_t n = traj.states.size();
  if (n < 2) throw Error(ErrorCode::invalid_argument, "trajectory has fewer than two states");
  SpatialField v{traj.states[n - 1].nx, traj.states[n - 1].dofs};
  for (std::size_t i = 0; i < v.dofs.size(); ++i) {
    v.dofs[i] = (v.dofs[i] - traj.states[n - 2].dofs[i]) / traj.dt;
  }
  return norm_hminus1(v);
}

double wave_energy(const WaveTrajectory& traj, const CoefficientField& a, std::size_t n) {
  if (n == 0 || n >= traj.states.size()) {
    throw Error(ErrorCode::invalid_argument, "wave_energy: step out of range");
  }
  const SpatialField& y = traj.states[n];
  const SpatialField& z = traj.states[n - 1];
  const GaussRule& g = gauss_unit(5);
  const double dx = 1.0 / y.nx;
  double sum = 0.0;
  for (int k = 0; k < y.nx; ++k) {
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double x = (k + g.points[q]) * dx;
      const double vt = (y.eval(x) - z.eval(x)) / traj.dt;
      const double vx = y.eval(x, 1);
      sum += g.weights[q] * dx * (vt * vt + a.value(x) * vx * vx);
    }
  }
  return 0.5 * sum;
}

namespace {

/// 1/2 int a(1)^2 theta^2 rho(1,.)^{-2} p_x(1,.)^2, i.e. 1/2 int rho0^2 v^2
/// written without the singular factor.
double control_cost(const TraceRaw& raw, const ProblemConfig& config) {
  const CarlemanWeights w(config.weights);
  const double a1 = config.coefficient.value(1.0);
  const GaussRule& g = gauss_unit(5);
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < raw.times.size(); ++j) {
    const double dt = raw.times[j + 1] - raw.times[j];
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double t = raw.times[j] + g.points[q] * dt;
      const double px = raw_px(raw, t);
      sum += g.weights[q] * dt * a1 * a1 * w.control_weight(t) * px * px;
    }
  }
  return 0.5 * sum;
}

}  // namespace

double eval_cost_J(const WaveTrajectory& traj, const ControlTrace& trace,
                   const ProblemConfig& config) {
  const CarlemanWeights w(config.weights);
  const GaussRule& g = gauss_unit(5);
  double state = 0.0;
  const std::size_t n = traj.states.size();
  for (std::size_t i = 0; i < n; ++i) {
    const SpatialField& y = traj.states[i];
    const double t = traj.times[i];
    const double dx = 1.0 / y.nx;
    double line = 0.0;
    for (int k = 0; k < y.nx; ++k) {
      for (std::size_t q = 0; q < g.size(); ++q) {
        const double x = (k + g.points[q]) * dx;
        const double r = w.rho(x, t);
        const double v = y.eval(x);
        line += g.weights[q] * dx * r * r * v * v;
      }
    }
    const double tw = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    state += tw * traj.dt * line;
  }
  return 0.5 * state + control_cost(trace.raw, config);
}

double eval_cost_field(const FieldPh& p, const ProblemConfig& config) {
  const SpaceTimeMesh& m = p.mesh();
  const CarlemanWeights w(config.weights);
  const WeightField wf(w, m, config.mode);
  const GaussRule& g = gauss_unit(config.quad_order);
  double state = 0.0;
  for (int l = 0; l < m.nt; ++l) {
    for (int k = 0; k < m.nx; ++k) {
      for (std::size_t qa = 0; qa < g.size(); ++qa) {
        const double x = m.x(k) + g.points[qa] * m.dx();
        for (std::size_t qb = 0; qb < g.size(); ++qb) {
          const double t = m.t(l) + g.points[qb] * m.dt();
          const double y = state_with(p, config, wf, x, t);
          const double r = w.rho(x, t);
          state += g.weights[qa] * g.weights[qb] * m.dx() * m.dt() * r * r * y * y;
        }
      }
    }
  }
  return 0.5 * state + control_cost(boundary_trace_x(p), config);
}

// ---------------------------------------------------------------------------

void write_control_csv(std::ostream& out, const ControlTrace& trace) {
  out.precision(12);
  out << "t,v,v_t\n";
  for (std::size_t l = 0; l < trace.times.size(); ++l) {
    out << trace.times[l] << ',' << trace.v[l] << ',' << trace.vt[l] << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const WaveTrajectory& traj, int stride) {
  stride = std::max(1, stride);
  out.precision(12);
  out << "t,x,y\n";
  const std::size_t n = traj.states.size();
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; i += stride) rows.push_back(i);
  if (rows.back() != n - 1) rows.push_back(n - 1);
  for (std::size_t i : rows) {
    const SpatialField& y = traj.states[i];
    for (int k = 0; k <= y.nx; ++k) {
      out << traj.times[i] << ',' << static_cast<double>(k) / y.nx << ',' << y.dofs[2 * k] << '\n';
    }
  }
}

}  // namespace wavenull
