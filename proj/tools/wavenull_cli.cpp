// Command-line front end; talks to the library only through wavenull.h.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wavenull/wavenull.h"

namespace {

struct ConfigDeleter {
  void operator()(wn_config* c) const { wn_config_free(c); }
};
struct ReportDeleter {
  void operator()(wn_report* r) const { wn_report_free(r); }
};
using ConfigPtr = std::unique_ptr<wn_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<wn_report, ReportDeleter>;

struct Failure {
  wn_status status;
};

void check(wn_status s) {
  if (s != WN_OK) {
    std::cerr << "error [" << wn_status_name(s) << "]: " << wn_last_error() << "\n";
    throw Failure{s};
  }
}

bool is_preset(const std::string& name) {
  for (size_t i = 0; i < wn_preset_count(); ++i) {
    if (name == wn_preset_id(i)) return true;
  }
  return false;
}

struct Overrides {
  std::vector<int> nx;
  int nt = 0;
  std::optional<int> reference;
  std::optional<double> s, lambda, delta;
  std::string cutoff;
  bool c0h = false;
  bool no_c0h = false;
  bool kappa = false;
  bool no_plot = false;
};

void add_mesh_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--nx", o.nx, "Space cells per mesh (repeat or list for a ladder)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--nt", o.nt, "Time cells (default round(T Nx))")->check(CLI::PositiveNumber);
  cmd->add_option("--s", o.s, "Carleman parameter s");
  cmd->add_option("--lambda", o.lambda, "Carleman parameter lambda");
  cmd->add_option("--delta", o.delta, "Cutoff width delta (0 disables the cutoff)");
  cmd->add_option("--cutoff", o.cutoff, "Cutoff profile")->check(CLI::IsMember({"root", "smoothstep"}));
}

ConfigPtr open_config(const std::string& target, const Overrides& o) {
  wn_config* raw = nullptr;
  if (is_preset(target)) {
    check(wn_config_from_preset(target.c_str(), &raw));
  } else {
    if (!std::filesystem::exists(target)) {
      std::cerr << "error: '" << target << "' is neither a preset nor an existing file (presets:";
      for (size_t i = 0; i < wn_preset_count(); ++i) std::cerr << ' ' << wn_preset_id(i);
      std::cerr << ")\n";
      throw Failure{WN_ERR_INVALID_ARGUMENT};
    }
    check(wn_config_from_file(target.c_str(), &raw));
  }
  ConfigPtr cfg(raw);
  if (!o.nx.empty()) check(wn_config_set_ladder(cfg.get(), o.nx.data(), o.nx.size()));
  if (o.nt > 0) check(wn_config_set_nt(cfg.get(), o.nt));
  if (o.reference) check(wn_config_set_reference(cfg.get(), *o.reference));
  if (o.s) check(wn_config_set_double(cfg.get(), "s", *o.s));
  if (o.lambda) check(wn_config_set_double(cfg.get(), "lambda", *o.lambda));
  if (o.delta) check(wn_config_set_double(cfg.get(), "delta", *o.delta));
  if (!o.cutoff.empty()) check(wn_config_set_cutoff(cfg.get(), o.cutoff.c_str()));
  if (o.c0h) check(wn_config_set_flag(cfg.get(), "c0h", 1));
  if (o.no_c0h) check(wn_config_set_flag(cfg.get(), "c0h", 0));
  if (o.kappa) check(wn_config_set_flag(cfg.get(), "kappa", 1));
  if (o.no_plot) check(wn_config_set_flag(cfg.get(), "plot_data", 0));
  return cfg;
}

void print_report(const wn_report* r) {
  const std::vector<std::string> shown = {"h",      "norm_p", "err_p",    "norm_v",
                                          "err_v",  "y_T_l2", "yt_T_hm1", "c0h"};
  std::printf("%-14s %5s %5s", "case", "Nx", "Nt");
  for (const auto& c : shown) std::printf(" %11s", c.c_str());
  std::printf("\n");
  for (size_t i = 0; i < wn_report_row_count(r); ++i) {
    const char* name = nullptr;
    int nx = 0, nt = 0;
    check(wn_report_row_info(r, i, &name, &nx, &nt));
    std::printf("%-14s %5d %5d", name, nx, nt);
    for (const auto& c : shown) {
      double v = NAN;
      check(wn_report_value(r, i, c.c_str(), &v));
      if (std::isfinite(v)) {
        std::printf(" %11.4e", v);
      } else {
        std::printf(" %11s", "-");
      }
    }
    std::printf("\n");
  }
}

void print_rates(const wn_report* r) {
  size_t n = 0;
  check(wn_report_rates(r, nullptr, 0, &n));
  if (n == 0) {
    std::printf("no column has three or more error values; no rates\n");
    return;
  }
  std::vector<wn_rate> rates(n);
  check(wn_report_rates(r, rates.data(), rates.size(), &n));
  std::printf("%-14s %-10s %7s %6s\n", "case", "column", "rate", "points");
  for (const wn_rate& x : rates) {
    std::printf("%-14s %-10s %7.3f %6d\n", x.case_name, x.column, x.rate, x.points);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary null controls of the 1D wave equation by a weighted space-time FEM"};
  app.set_version_flag("--version", std::string(wn_version()));
  app.require_subcommand(1);

  Overrides run_o;
  std::string run_target;
  std::string out_dir;
  int threads = 1;
  bool no_reference = false;
  CLI::App* run = app.add_subcommand("run", "Run a preset or a configuration file over its mesh ladder");
  run->add_option("target", run_target, "Preset id or configuration file")->required();
  add_mesh_flags(run, run_o);
  run->add_option("--reference", run_o.reference, "Reference Nx for the error columns")
      ->check(CLI::PositiveNumber);
  run->add_flag("--no-reference", no_reference, "Skip the reference solve");
  run->add_flag("--c0h", run_o.c0h, "Also compute C_0h on every mesh");
  run->add_flag("--no-c0h", run_o.no_c0h, "Skip C_0h even when the preset asks for it");
  run->add_flag("--kappa", run_o.kappa, "Estimate the condition number of M_h");
  run->add_flag("--no-plot", run_o.no_plot, "Do not write plot_*.dat files");
  run->add_option("--out", out_dir, "Output directory (report.csv, control_/state_/field_<N>.csv)");
  run->add_option("--threads", threads, "Meshes solved concurrently")->check(CLI::PositiveNumber);
  run->add_flag("--print-config", "Print the resolved configuration before running");

  std::string rates_dir;
  CLI::App* rates = app.add_subcommand("rates", "Convergence rates of an existing report");
  rates->add_option("report", rates_dir, "Directory holding report.csv, or the file")->required();

  Overrides obs_o;
  std::string obs_target;
  CLI::App* obs = app.add_subcommand("obs-constant", "Discrete observability constant C_0h");
  obs->add_option("target", obs_target, "Configuration file or preset id")->required();
  add_mesh_flags(obs, obs_o);

  app.add_subcommand("presets", "List the built-in presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (no_reference) run_o.reference = 0;
      ConfigPtr cfg = open_config(run_target, run_o);
      if (run->count("--print-config")) {
        size_t need = 0;
        check(wn_config_describe(cfg.get(), nullptr, 0, &need));
        std::string text(need, '\0');
        check(wn_config_describe(cfg.get(), text.data(), text.size(), &need));
        std::printf("%s\n", text.c_str());
      }
      wn_report* raw = nullptr;
      check(wn_run(cfg.get(), threads, out_dir.empty() ? nullptr : out_dir.c_str(), &raw));
      ReportPtr rep(raw);
      print_report(rep.get());
      size_t n = 0;
      check(wn_report_rates(rep.get(), nullptr, 0, &n));
      if (n > 0) {
        std::printf("\n");
        print_rates(rep.get());
      }
      if (!out_dir.empty()) std::printf("\nwrote %s/report.csv\n", out_dir.c_str());
    } else if (rates->parsed()) {
      wn_report* raw = nullptr;
      check(wn_report_load(rates_dir.c_str(), &raw));
      ReportPtr rep(raw);
      print_rates(rep.get());
    } else if (obs->parsed()) {
      ConfigPtr cfg = open_config(obs_target, obs_o);
      size_t nl = 0;
      check(wn_config_ladder(cfg.get(), nullptr, 0, &nl));
      std::vector<int> meshes(nl);
      check(wn_config_ladder(cfg.get(), meshes.data(), nl, &nl));
      size_t cases = 0;
      check(wn_observability_constant(cfg.get(), meshes.front(), nullptr, nullptr, 0, &cases));
      std::printf("%-14s %5s %14s %6s\n", "case", "Nx", "C0h", "iters");
      std::vector<double> values(cases);
      std::vector<int> iters(cases);
      for (int nx : meshes) {
        check(wn_observability_constant(cfg.get(), nx, values.data(), iters.data(), cases, &cases));
        for (size_t c = 0; c < cases; ++c) {
          std::printf("%-14s %5d %14.6e %6d\n", wn_config_case_name(cfg.get(), c), nx, values[c],
                      iters[c]);
        }
      }
    } else {
      for (size_t i = 0; i < wn_preset_count(); ++i) std::printf("%s\n", wn_preset_id(i));
    }
  } catch (const Failure& f) {
    return 10 + static_cast<int>(f.status);
  }
  return 0;
}
