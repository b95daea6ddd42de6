#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavenull/control.hpp"
#include "wavenull/fem_space.hpp"
#include "wavenull/linalg.hpp"
#include "wavenull/problem.hpp"

namespace wavenull {

struct SolveOptions {
  bool residual = true;
  bool c0h = false;
  bool kappa = false;
  /// Refinement sweeps against the kept matrix (only when residual or kappa).
  int refinement_steps = 2;
};

/// p_h solving m_h(p_h, q) = l_h(q) for all q in P_h, with diagnostics.
struct DiscreteSolution {
  FieldPh p;
  double norm_p = 0.0;             ///< sqrt(p^T M p)
  double galerkin_residual = 0.0;  ///< max |M p - b| / max |b|; NaN when skipped
  std::optional<EigenEstimate> c0h;
  std::optional<EigenEstimate> kappa;
};

DiscreteSolution solve_discrete(const ProblemConfig& config, const SolveOptions& options = {});

/// C_0h alone (no load, no solve).
EigenEstimate observability_for(const ProblemConfig& config);

/// Named configuration with its mesh ladder. A preset may hold several cases
/// (table1 runs two horizons).
struct Preset {
  std::string id;
  std::vector<std::pair<std::string, ProblemConfig>> cases;
  std::vector<int> ladder;
  int reference = 0;  ///< 0: no reference solution
  bool c0h = false;
  bool solve = true;
};

const std::vector<std::string>& preset_ids();
Preset make_preset(const std::string& id);
/// A single-case preset around a user configuration; the ladder is its Nx.
Preset preset_from_config(const ProblemConfig& config, const std::string& name);

struct RunOptions {
  std::optional<std::vector<int>> ladder;
  std::optional<int> reference;
  /// Explicit Nt for every mesh (only meaningful with a one-entry ladder).
  std::optional<int> nt;
  std::optional<double> s;
  std::optional<double> lambda;
  std::optional<double> delta;
  std::optional<CutoffShape> cutoff;
  std::optional<bool> c0h;
  bool kappa = false;
  int threads = 1;
  /// Output directory; empty disables file output.
  std::string out_dir;
  bool write_plot_data = true;
};

/// `config` on the Nx mesh with the weight overrides of `options` applied.
ProblemConfig with_mesh(ProblemConfig config, int nx, const RunOptions& options);

/// One mesh of one case. Missing quantities are NaN.
struct ReportRow {
  std::string case_name;
  int nx = 0;
  int nt = 0;
  std::map<std::string, double> values;

  double get(const std::string& column) const;
};

struct RunReport {
  std::string preset;
  std::vector<ReportRow> rows;

  /// Rows of one case ordered by refinement.
  std::vector<const ReportRow*> case_rows(const std::string& case_name) const;
  std::vector<std::string> case_names() const;
};

/// Column order of report.csv.
const std::vector<std::string>& report_columns();

RunReport run_preset(const Preset& preset, const RunOptions& options);

void write_report_csv(std::ostream& out, const RunReport& report);
RunReport read_report_csv(std::istream& in);

/// Least-squares slope of log(error) against log(h).
double convergence_rate(const std::vector<double>& h, const std::vector<double>& errors);

struct RateEntry {
  std::string case_name;
  std::string column;
  double rate = 0.0;
  int points = 0;
};

/// Rates of the error and residual columns of every case having at least
/// three finite positive entries.
std::vector<RateEntry> convergence_rates(const RunReport& report);

}  // namespace wavenull
