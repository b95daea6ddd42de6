#include "wavenull/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "wavenull/assembly.hpp"
#include "wavenull/config.hpp"
#include "wavenull/error.hpp"
#include "wavenull/quadrature.hpp"

namespace wavenull {

namespace fs = std::filesystem;

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

std::shared_ptr<const DofMap> make_dofs(const ProblemConfig& config) {
  return std::make_shared<const DofMap>(SpaceTimeMesh(config.nx, config.nt, config.weights.T));
}

}  // namespace

DiscreteSolution solve_discrete(const ProblemConfig& config, const SolveOptions& options) {
  config.validate();
  auto dofs = make_dofs(config);
  BandedSpdMatrix m = assemble_M(*dofs, config, config.mode, config.quad_order);
  const std::vector<double> b = assemble_rhs(*dofs, config.data);
  std::optional<BandedSpdMatrix> keep;
  if (options.residual || options.kappa) keep = m;
  const CholeskyFactor factor = CholeskyFactor::factorize(std::move(m));

  std::vector<double> x = factor.solve(b);
  if (keep) {
    // Iterative refinement: the weights span many orders of magnitude and a
    // single banded solve loses a few digits on the finest meshes.
    for (int it = 0; it < options.refinement_steps; ++it) {
      std::vector<double> r = keep->residual(x, b);
      factor.solve_in_place(r);
      for (std::size_t i = 0; i < r.size(); ++i) x[i] += r[i];
    }
  }
  DiscreteSolution out{FieldPh(dofs, std::move(x)), 0.0, 0.0, std::nullopt, std::nullopt};
  const std::span<const double> p = out.p.coeffs();
  if (keep) {
    const std::vector<double> res = keep->residual(p, b);
    double num = 0.0;
    double den = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      num = std::max(num, std::abs(res[i]));
      den = std::max(den, std::abs(b[i]));
      quad += p[i] * (b[i] - res[i]);
    }
    out.galerkin_residual = den > 0.0 ? num / den : num;
    out.norm_p = std::sqrt(std::max(quad, 0.0));
  } else {
    out.galerkin_residual = nan_v;
    out.norm_p = std::sqrt(std::max(0.0, std::inner_product(p.begin(), p.end(), b.begin(), 0.0)));
  }
  if (options.c0h) out.c0h = observability_constant(assemble_A_obs(*dofs), factor);
  if (options.kappa) out.kappa = condition_estimate(*keep, factor);
  return out;
}

EigenEstimate observability_for(const ProblemConfig& config) {
  config.validate();
  auto dofs = make_dofs(config);
  const CholeskyFactor factor =
      CholeskyFactor::factorize(assemble_M(*dofs, config, config.mode, config.quad_order));
  return observability_constant(assemble_A_obs(*dofs), factor);
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids = {"table1",        "smooth",  "gaussian", "h1xl2",
                                               "discontinuous", "varcoef"};
  return ids;
}

Preset make_preset(const std::string& id) {
  ProblemConfig base;
  base.coefficient = CoefficientField::constant(1.0);
  base.weights = WeightParams{};
  base.weights.T = 2.2;

  Preset p;
  p.id = id;
  p.ladder = {10, 20, 40, 80};
  p.reference = 160;
  if (id == "table1") {
    base.potential = PotentialField::constant(1.0);
    ProblemConfig shorter = base;
    shorter.weights.T = 1.5;
    shorter.enforce_horizon = false;  // the blow-up case lies below the critical horizon
    p.cases = {{"T2.2", base}, {"T1.5", shorter}};
    p.reference = 0;
    p.c0h = true;
    p.solve = false;
    return p;
  }
  if (id == "smooth") {
    base.potential = PotentialField::constant(1.0);
    base.data = {DataFunction::parse("sin"), DataFunction::parse("zero")};
  } else if (id == "gaussian") {
    base.potential = PotentialField::constant(1.0);
    base.data = {DataFunction::parse("gaussian 500 0.2"), DataFunction::parse("zero")};
  } else if (id == "h1xl2") {
    base.potential = PotentialField::constant(0.0);
    base.data = {DataFunction::parse("tent"), DataFunction::parse("indicator 0.2 0.5 10")};
  } else if (id == "discontinuous") {
    base.potential = PotentialField::constant(0.0);
    base.data = {DataFunction::parse("indicator 0.5 0.7"), DataFunction::parse("zero")};
    p.reference = 0;
  } else if (id == "varcoef") {
    base.coefficient = CoefficientField::transition(1.0, 5.0, 0.45, 0.55);
    base.potential = PotentialField::constant(0.0);
    base.data = {DataFunction::parse("gaussian 500 0.2"), DataFunction::parse("zero")};
    base.enforce_horizon = false;  // T = 2.2 is kept below the critical horizon on purpose
    p.c0h = true;
  } else {
    std::string known;
    for (const auto& k : preset_ids()) known += " " + k;
    throw Error(ErrorCode::invalid_argument, "unknown preset '" + id + "' (known:" + known + ")");
  }
  p.cases = {{id, base}};
  return p;
}

Preset preset_from_config(const ProblemConfig& config, const std::string& name) {
  Preset p;
  p.id = name;
  p.cases = {{name, config}};
  p.ladder = {config.nx};
  p.reference = 0;
  return p;
}

// ---------------------------------------------------------------------------

double ReportRow::get(const std::string& column) const {
  const auto it = values.find(column);
  return it == values.end() ? nan_v : it->second;
}

std::vector<const ReportRow*> RunReport::case_rows(const std::string& case_name) const {
  std::vector<const ReportRow*> out;
  for (const ReportRow& r : rows) {
    if (r.case_name == case_name) out.push_back(&r);
  }
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->nx < b->nx; });
  return out;
}

std::vector<std::string> RunReport::case_names() const {
  std::vector<std::string> out;
  for (const ReportRow& r : rows) {
    if (std::find(out.begin(), out.end(), r.case_name) == out.end()) out.push_back(r.case_name);
  }
  return out;
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {
      "h",      "n_dofs", "bandwidth", "norm_p", "err_p",          "norm_v",
      "err_v",  "y_T_l2", "yt_T_hm1",  "cost_J", "c0h",            "c0h_iterations",
      "kappa",  "galerkin_residual",   "substeps"};
  return cols;
}

ProblemConfig with_mesh(ProblemConfig c, int nx, const RunOptions& opt) {
  c.nx = nx;
  c.nt = opt.nt ? *opt.nt : matched_time_cells(nx, c.weights.T);
  if (opt.s) c.weights.s = *opt.s;
  if (opt.lambda) c.weights.lambda = *opt.lambda;
  if (opt.delta) c.weights.delta = *opt.delta;
  if (opt.cutoff) c.weights.cutoff = *opt.cutoff;
  return c;
}

namespace {

std::string file_tag(const Preset& preset, const std::string& case_name, int nx) {
  std::string tag = std::to_string(nx);
  if (preset.cases.size() > 1) tag = case_name + "_" + tag;
  return tag;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  body(out);
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path.string() + "'");
}

/// Reference solution and its control, loaded from disk when present.
struct Reference {
  ProblemConfig config;
  std::optional<FieldPh> p;
  ControlTrace trace;
};

Reference make_reference(const Preset& preset, const std::string& case_name,
                         const ProblemConfig& base, const RunOptions& opt) {
  const int n = opt.reference ? *opt.reference : preset.reference;
  Reference ref{with_mesh(base, n, opt), std::nullopt, {}};
  ref.config.nt = matched_time_cells(n, base.weights.T);
  fs::path cached;
  if (!opt.out_dir.empty()) {
    // The file name carries a digest of the configuration so that changed
    // weights or data never pick up a stale reference.
    std::ostringstream cfg_text;
    write_config(cfg_text, ref.config);
    std::ostringstream digest;
    digest << std::hex << (std::hash<std::string>{}(cfg_text.str()) & 0xffffffffu);
    cached = fs::path(opt.out_dir) /
             ("field_ref_" + file_tag(preset, case_name, n) + "_" + digest.str() + ".csv");
    if (fs::exists(cached)) {
      std::ifstream in(cached);
      FieldPh f = read_field_csv(in, ref.config.weights.T);
      if (f.mesh().nx == ref.config.nx && f.mesh().nt == ref.config.nt) ref.p = std::move(f);
    }
  }
  if (!ref.p) {
    SolveOptions so;
    so.residual = false;
    ref.p = solve_discrete(ref.config, so).p;
    if (!cached.empty()) write_file(cached, [&](std::ostream& o) { write_field_csv(o, *ref.p); });
  }
  ref.trace = extract_control(*ref.p, ref.config);
  return ref;
}

double trace_difference(const ControlTrace& fine, const ControlTrace& coarse) {
  const GaussRule& g = gauss_unit(5);
  double sum = 0.0;
  for (int j = 0; j < fine.intervals(); ++j) {
    const double dt = fine.times[j + 1] - fine.times[j];
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double t = fine.times[j] + g.points[q] * dt;
      const double d = sample_control(fine, j, g.points[q]) - coarse(t);
      sum += g.weights[q] * dt * d * d;
    }
  }
  return std::sqrt(sum);
}

void write_surface(std::ostream& out, const std::vector<double>& xs, const std::vector<double>& ts,
                   const std::function<double(std::size_t, std::size_t)>& value) {
  out.precision(10);
  out << "# x t value\n";
  for (std::size_t l = 0; l < ts.size(); ++l) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      out << xs[k] << ' ' << ts[l] << ' ' << value(k, l) << '\n';
    }
    out << '\n';
  }
}

ReportRow run_mesh(const Preset& preset, const std::string& case_name, const ProblemConfig& cfg,
                   const Reference* ref, const RunOptions& opt, double& seconds) {
  const auto start = std::chrono::steady_clock::now();
  ReportRow row;
  row.case_name = case_name;
  row.nx = cfg.nx;
  row.nt = cfg.nt;
  auto& v = row.values;
  for (const auto& c : report_columns()) v[c] = nan_v;
  v["h"] = 1.0 / cfg.nx;
  {
    const DofMap dofs(SpaceTimeMesh(cfg.nx, cfg.nt, cfg.weights.T));
    v["n_dofs"] = static_cast<double>(dofs.num_free());
    v["bandwidth"] = dofs.half_bandwidth();
  }
  const bool want_c0h = opt.c0h ? *opt.c0h : preset.c0h;
  if (!preset.solve) {
    if (want_c0h) {
      const EigenEstimate e = observability_for(cfg);
      v["c0h"] = e.value;
      v["c0h_iterations"] = e.iterations;
    }
  } else {
    SolveOptions so;
    so.c0h = want_c0h;
    so.kappa = opt.kappa;
    const DiscreteSolution sol = solve_discrete(cfg, so);
    v["norm_p"] = sol.norm_p;
    v["galerkin_residual"] = sol.galerkin_residual;
    if (sol.c0h) {
      v["c0h"] = sol.c0h->value;
      v["c0h_iterations"] = sol.c0h->iterations;
    }
    if (sol.kappa) v["kappa"] = sol.kappa->value;

    const ControlTrace trace = extract_control(sol.p, cfg);
    v["norm_v"] = norm_l2_control(trace);
    ForwardOptions fo;
    fo.substeps = cfg.substeps;
    const WaveTrajectory traj = forward_solve(cfg, trace, fo);
    const int substeps = static_cast<int>(std::lround(cfg.weights.T / cfg.nt / traj.dt));
    v["substeps"] = substeps;
    v["y_T_l2"] = norm_l2_final(traj);
    v["yt_T_hm1"] = norm_hminus1_final_velocity(traj);
    v["cost_J"] = eval_cost_J(traj, trace, cfg);

    if (ref && ref->p) {
      const FieldPh fine = prolongate(sol.p, ref->p->dofmap_ptr());
      std::vector<double> diff(fine.coeffs().begin(), fine.coeffs().end());
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = ref->p->coeffs()[i] - diff[i];
      const FieldPh d(ref->p->dofmap_ptr(), std::move(diff));
      v["err_p"] = std::sqrt(std::max(0.0, energy_norm_sq(d, ref->config, ref->config.mode,
                                                          ref->config.quad_order)));
      v["err_v"] = trace_difference(ref->trace, trace);
    }

    if (!opt.out_dir.empty()) {
      const fs::path dir(opt.out_dir);
      const std::string tag = file_tag(preset, case_name, cfg.nx);
      write_file(dir / ("control_" + tag + ".csv"), [&](std::ostream& o) { write_control_csv(o, trace); });
      write_file(dir / ("state_" + tag + ".csv"),
                 [&](std::ostream& o) { write_trajectory_csv(o, traj, substeps); });
      write_file(dir / ("field_" + tag + ".csv"), [&](std::ostream& o) { write_field_csv(o, sol.p); });
      if (opt.write_plot_data) {
        const SpaceTimeMesh& m = sol.p.mesh();
        std::vector<double> xs, ts;
        for (int k = 0; k <= m.nx; ++k) xs.push_back(m.x(k));
        for (int l = 0; l <= m.nt; ++l) ts.push_back(m.t(l));
        write_file(dir / ("plot_p_" + tag + ".dat"), [&](std::ostream& o) {
          write_surface(o, xs, ts, [&](std::size_t k, std::size_t l) {
            return sol.p.nodal(static_cast<int>(k), static_cast<int>(l), dof_u);
          });
        });
        const StateGrid sg = extract_state(sol.p, cfg, m.nx, m.nt);
        write_file(dir / ("plot_y_" + tag + ".dat"), [&](std::ostream& o) {
          write_surface(o, sg.xs, sg.ts,
                        [&](std::size_t k, std::size_t l) { return sg.y[l * sg.xs.size() + k]; });
        });
        write_file(dir / ("plot_v_" + tag + ".dat"), [&](std::ostream& o) {
          o.precision(10);
          o << "# t v\n";
          for (int j = 0; j < trace.intervals(); ++j) {
            for (int q = 0; q < 4; ++q) {
              o << trace.times[j] + q * (trace.times[j + 1] - trace.times[j]) / 4.0 << ' '
                << sample_control(trace, j, q / 4.0) << '\n';
            }
          }
          o << trace.times.back() << ' ' << trace.v.back() << '\n';
        });
      }
    }
  }
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

RunReport run_preset(const Preset& preset, const RunOptions& opt) {
  std::vector<int> ladder = opt.ladder ? *opt.ladder : preset.ladder;
  if (ladder.empty()) throw Error(ErrorCode::invalid_argument, "empty mesh ladder");
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder[i] <= ladder[i - 1]) {
      throw Error(ErrorCode::invalid_argument, "mesh ladder must be strictly refining");
    }
  }
  const int ref_n = opt.reference ? *opt.reference : preset.reference;
  if (ref_n > 0 && preset.solve) {
    if (ref_n <= ladder.back()) {
      throw Error(ErrorCode::invalid_argument, "reference mesh must be finer than the ladder");
    }
    for (int n : ladder) {
      if (ref_n % n != 0) {
        throw Error(ErrorCode::invalid_argument, "reference N must be a multiple of every ladder N");
      }
    }
  }
  if (!opt.out_dir.empty()) fs::create_directories(opt.out_dir);

  RunReport report;
  report.preset = preset.id;
  std::vector<std::pair<std::string, double>> timings;
  for (const auto& [case_name, base] : preset.cases) {
    std::optional<Reference> ref;
    if (ref_n > 0 && preset.solve) {
      try {
        ref = make_reference(preset, case_name, base, opt);
      } catch (const Error& e) {
        throw Error(e.code(), case_name + ", reference N = " + std::to_string(ref_n) + ": " + e.what());
      }
    }
    std::vector<ReportRow> rows(ladder.size());
    std::vector<double> secs(ladder.size(), 0.0);
    std::vector<std::exception_ptr> errors(ladder.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t i = next++; i < ladder.size(); i = next++) {
        try {
          const ProblemConfig cfg = with_mesh(base, ladder[i], opt);
          rows[i] = run_mesh(preset, case_name, cfg, ref ? &*ref : nullptr, opt, secs[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const int nthreads = std::clamp(opt.threads, 1, static_cast<int>(ladder.size()));
    if (nthreads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      if (!errors[i]) continue;
      try {
        std::rethrow_exception(errors[i]);
      } catch (const Error& e) {
        throw Error(e.code(), case_name + ", N = " + std::to_string(ladder[i]) + ": " + e.what());
      }
    }
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      timings.emplace_back(case_name + "," + std::to_string(ladder[i]), secs[i]);
      report.rows.push_back(std::move(rows[i]));
    }
  }

  if (!opt.out_dir.empty()) {
    const fs::path dir(opt.out_dir);
    write_file(dir / "report.csv", [&](std::ostream& o) { write_report_csv(o, report); });
    write_file(dir / "timing.csv", [&](std::ostream& o) {
      o << "case,nx,seconds\n";
      for (const auto& [key, s] : timings) o << key << ',' << s << '\n';
    });
  }
  return report;
}

// ---------------------------------------------------------------------------

void write_report_csv(std::ostream& out, const RunReport& report) {
  out << "# preset " << report.preset << "\n";
  out << "case,nx,nt";
  for (const auto& c : report_columns()) out << ',' << c;
  out << '\n';
  out.precision(10);
  for (const ReportRow& r : report.rows) {
    out << r.case_name << ',' << r.nx << ',' << r.nt;
    for (const auto& c : report_columns()) {
      out << ',';
      const double v = r.get(c);
      if (std::isfinite(v)) out << v;
    }
    out << '\n';
  }
}

RunReport read_report_csv(std::istream& in) {
  RunReport report;
  std::string line;
  std::vector<std::string> header;
  int lineno = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# preset ", 0) == 0) {
      report.preset = line.substr(9);
      continue;
    }
    if (line[0] == '#') continue;
    const std::vector<std::string> cells = split(line);
    if (header.empty()) {
      header = cells;
      if (header.size() < 3 || header[0] != "case") {
        throw Error(ErrorCode::parse, "report.csv:" + std::to_string(lineno) + ": bad header");
      }
      continue;
    }
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::parse, "report.csv:" + std::to_string(lineno) + ": expected " +
                                        std::to_string(header.size()) + " fields");
    }
    ReportRow r;
    r.case_name = cells[0];
    try {
      r.nx = std::stoi(cells[1]);
      r.nt = std::stoi(cells[2]);
      for (std::size_t i = 3; i < cells.size(); ++i) {
        r.values[header[i]] = cells[i].empty() ? nan_v : std::stod(cells[i]);
      }
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse, "report.csv:" + std::to_string(lineno) + ": bad number");
    }
    report.rows.push_back(std::move(r));
  }
  if (header.empty()) throw Error(ErrorCode::parse, "report.csv: missing header");
  return report;
}

double convergence_rate(const std::vector<double>& h, const std::vector<double>& errors) {
  if (h.size() != errors.size() || h.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "convergence rate needs at least two (h, error) pairs");
  }
  const std::size_t n = h.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0 && errors[i] > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "convergence rate needs positive h and errors");
    }
    mx += std::log(h[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(h[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::invalid_argument, "degenerate ladder: all h equal");
  return sxy / sxx;
}

std::vector<RateEntry> convergence_rates(const RunReport& report) {
  std::vector<RateEntry> out;
  for (const std::string& name : report.case_names()) {
    const auto rows = report.case_rows(name);
    for (const char* col : {"err_p", "err_v", "y_T_l2", "yt_T_hm1"}) {
      std::vector<double> h, e;
      for (const ReportRow* r : rows) {
        const double v = r->get(col);
        if (std::isfinite(v) && v > 0.0) {
          h.push_back(1.0 / r->nx);
          e.push_back(v);
        }
      }
      if (h.size() >= 3) out.push_back({name, col, convergence_rate(h, e), static_cast<int>(h.size())});
    }
  }
  return out;
}

}  // namespace wavenull
