#include "wavenull/wavenull.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "wavenull/config.hpp"
#include "wavenull/error.hpp"
#include "wavenull/experiment.hpp"

#ifndef WAVENULL_VERSION
#define WAVENULL_VERSION "0.0.0"
#endif

struct wn_config {
  wavenull::Preset preset;
  wavenull::RunOptions options;
};

struct wn_report {
  wavenull::RunReport report;
};

namespace {

thread_local std::string g_last_error;

wn_status fail(wn_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

/// Runs `body`, translating exceptions into status codes.
template <class F>
wn_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const wavenull::Error& e) {
    return fail(static_cast<wn_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(WN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(WN_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(WN_ERR_INTERNAL, "unknown failure");
  }
}

wn_status null_arg(const char* what) {
  return fail(WN_ERR_INVALID_ARGUMENT, std::string(what) + " must not be NULL");
}

}  // namespace

extern "C" {

const char* wn_version(void) { return WAVENULL_VERSION; }

const char* wn_last_error(void) { return g_last_error.c_str(); }

const char* wn_status_name(wn_status s) {
  switch (s) {
    case WN_OK: return "ok";
    case WN_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case WN_ERR_PARSE: return "parse";
    case WN_ERR_INVALID_COEFFICIENT: return "invalid_coefficient";
    case WN_ERR_INADMISSIBLE_COEFFICIENT: return "inadmissible_coefficient";
    case WN_ERR_TIME_HORIZON: return "time_horizon";
    case WN_ERR_WEIGHT_OVERFLOW: return "weight_overflow";
    case WN_ERR_DOMAIN: return "domain";
    case WN_ERR_CONSTRAINT_VIOLATION: return "constraint_violation";
    case WN_ERR_NOT_SPD: return "not_spd";
    case WN_ERR_NO_CONVERGENCE: return "no_convergence";
    case WN_ERR_CFL: return "cfl";
    case WN_ERR_IO: return "io";
    case WN_ERR_BUFFER_TOO_SMALL: return "buffer_too_small";
    case WN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

size_t wn_preset_count(void) { return wavenull::preset_ids().size(); }

const char* wn_preset_id(size_t index) {
  const auto& ids = wavenull::preset_ids();
  return index < ids.size() ? ids[index].c_str() : nullptr;
}

wn_status wn_config_from_preset(const char* id, wn_config** out) {
  if (!id) return null_arg("id");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new wn_config{wavenull::make_preset(id), {}};
    return WN_OK;
  });
}

wn_status wn_config_from_file(const char* path, wn_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    const wavenull::ProblemConfig cfg = wavenull::load_config(path);
    cfg.validate();
    const std::string name = std::filesystem::path(path).stem().string();
    *out = new wn_config{wavenull::preset_from_config(cfg, name), {}};
    return WN_OK;
  });
}

void wn_config_free(wn_config* config) { delete config; }

wn_status wn_config_set_ladder(wn_config* config, const int* nx, size_t count) {
  if (!config) return null_arg("config");
  if (!nx || count == 0) return fail(WN_ERR_INVALID_ARGUMENT, "ladder must not be empty");
  for (size_t i = 0; i < count; ++i) {
    if (nx[i] < 1) return fail(WN_ERR_INVALID_ARGUMENT, "ladder entries must be positive");
    if (i > 0 && nx[i] <= nx[i - 1]) {
      return fail(WN_ERR_INVALID_ARGUMENT, "mesh ladder must be strictly refining");
    }
  }
  config->options.ladder = std::vector<int>(nx, nx + count);
  g_last_error.clear();
  return WN_OK;
}

wn_status wn_config_ladder(const wn_config* config, int* nx, size_t capacity, size_t* count) {
  if (!config) return null_arg("config");
  const std::vector<int>& l = config->options.ladder ? *config->options.ladder : config->preset.ladder;
  if (count) *count = l.size();
  g_last_error.clear();
  if (!nx) return WN_OK;
  if (capacity < l.size()) return fail(WN_ERR_BUFFER_TOO_SMALL, "ladder buffer too small");
  std::copy(l.begin(), l.end(), nx);
  return WN_OK;
}

wn_status wn_config_set_nt(wn_config* config, int nt) {
  if (!config) return null_arg("config");
  if (nt < 0) return fail(WN_ERR_INVALID_ARGUMENT, "Nt must be non-negative");
  if (nt == 0) {
    config->options.nt.reset();
  } else {
    config->options.nt = nt;
  }
  g_last_error.clear();
  return WN_OK;
}

wn_status wn_config_set_reference(wn_config* config, int nx) {
  if (!config) return null_arg("config");
  if (nx < 0) return fail(WN_ERR_INVALID_ARGUMENT, "reference Nx must be non-negative");
  config->options.reference = nx;
  g_last_error.clear();
  return WN_OK;
}

wn_status wn_config_set_double(wn_config* config, const char* key, double value) {
  if (!config) return null_arg("config");
  if (!key) return null_arg("key");
  if (!std::isfinite(value)) return fail(WN_ERR_INVALID_ARGUMENT, "value must be finite");
  const std::string k = key;
  if (k == "s") {
    config->options.s = value;
  } else if (k == "lambda") {
    config->options.lambda = value;
  } else if (k == "delta") {
    config->options.delta = value;
  } else {
    return fail(WN_ERR_INVALID_ARGUMENT, "unknown parameter '" + k + "' (expected s, lambda, delta)");
  }
  g_last_error.clear();
  return WN_OK;
}

wn_status wn_config_set_cutoff(wn_config* config, const char* shape) {
  if (!config) return null_arg("config");
  if (!shape) return null_arg("shape");
  const std::string s = shape;
  if (s == "smoothstep") {
    config->options.cutoff = wavenull::CutoffShape::smoothstep;
  } else if (s == "root") {
    config->options.cutoff = wavenull::CutoffShape::root;
  } else {
    return fail(WN_ERR_INVALID_ARGUMENT, "cutoff must be 'smoothstep' or 'root'");
  }
  g_last_error.clear();
  return WN_OK;
}

wn_status wn_config_set_flag(wn_config* config, const char* key, int value) {
  if (!config) return null_arg("config");
  if (!key) return null_arg("key");
  const std::string k = key;
  if (k == "c0h") {
    config->options.c0h = value != 0;
  } else if (k == "kappa") {
    config->options.kappa = value != 0;
  } else if (k == "plot_data") {
    config->options.write_plot_data = value != 0;
  } else {
    return fail(WN_ERR_INVALID_ARGUMENT, "unknown flag '" + k + "' (expected c0h, kappa, plot_data)");
  }
  g_last_error.clear();
  return WN_OK;
}

wn_status wn_config_describe(const wn_config* config, char* buffer, size_t capacity, size_t* written) {
  if (!config) return null_arg("config");
  return guarded([&] {
    std::ostringstream out;
    wavenull::write_config(out, config->preset.cases.front().second);
    const std::string text = out.str();
    if (written) *written = text.size() + 1;
    if (!buffer) return WN_OK;
    if (capacity < text.size() + 1) return fail(WN_ERR_BUFFER_TOO_SMALL, "buffer too small");
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    return WN_OK;
  });
}

wn_status wn_run(const wn_config* config, int threads, const char* out_dir, wn_report** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  if (threads < 1) return fail(WN_ERR_INVALID_ARGUMENT, "threads must be at least 1");
  return guarded([&] {
    wavenull::RunOptions opt = config->options;
    opt.threads = threads;
    opt.out_dir = out_dir ? out_dir : "";
    *out = new wn_report{wavenull::run_preset(config->preset, opt)};
    return WN_OK;
  });
}

wn_status wn_report_load(const char* path, wn_report** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    std::filesystem::path p(path);
    if (std::filesystem::is_directory(p)) p /= "report.csv";
    std::ifstream in(p);
    if (!in) throw wavenull::Error(wavenull::ErrorCode::io, "cannot open '" + p.string() + "'");
    *out = new wn_report{wavenull::read_report_csv(in)};
    return WN_OK;
  });
}

void wn_report_free(wn_report* report) { delete report; }

size_t wn_report_row_count(const wn_report* report) { return report ? report->report.rows.size() : 0; }

wn_status wn_report_row_info(const wn_report* report, size_t row, const char** case_name, int* nx,
                             int* nt) {
  if (!report) return null_arg("report");
  if (row >= report->report.rows.size()) return fail(WN_ERR_INVALID_ARGUMENT, "row out of range");
  const auto& r = report->report.rows[row];
  if (case_name) *case_name = r.case_name.c_str();
  if (nx) *nx = r.nx;
  if (nt) *nt = r.nt;
  g_last_error.clear();
  return WN_OK;
}

wn_status wn_report_value(const wn_report* report, size_t row, const char* column, double* value) {
  if (!report) return null_arg("report");
  if (!column) return null_arg("column");
  if (!value) return null_arg("value");
  if (row >= report->report.rows.size()) return fail(WN_ERR_INVALID_ARGUMENT, "row out of range");
  const auto& cols = wavenull::report_columns();
  if (std::find(cols.begin(), cols.end(), column) == cols.end()) {
    return fail(WN_ERR_INVALID_ARGUMENT, std::string("unknown column '") + column + "'");
  }
  *value = report->report.rows[row].get(column);
  g_last_error.clear();
  return WN_OK;
}

size_t wn_report_column_count(void) { return wavenull::report_columns().size(); }

const char* wn_report_column_name(size_t index) {
  const auto& cols = wavenull::report_columns();
  return index < cols.size() ? cols[index].c_str() : nullptr;
}

wn_status wn_report_write_csv(const wn_report* report, const char* path) {
  if (!report) return null_arg("report");
  if (!path) return null_arg("path");
  return guarded([&] {
    std::ofstream out(path);
    if (!out) throw wavenull::Error(wavenull::ErrorCode::io, std::string("cannot write '") + path + "'");
    wavenull::write_report_csv(out, report->report);
    return WN_OK;
  });
}

wn_status wn_report_rates(const wn_report* report, wn_rate* rates, size_t capacity, size_t* count) {
  if (!report) return null_arg("report");
  return guarded([&] {
    const auto entries = wavenull::convergence_rates(report->report);
    if (count) *count = entries.size();
    if (!rates) return WN_OK;
    if (capacity < entries.size()) return fail(WN_ERR_BUFFER_TOO_SMALL, "rate buffer too small");
    for (size_t i = 0; i < entries.size(); ++i) {
      wn_rate& r = rates[i];
      std::snprintf(r.case_name, sizeof r.case_name, "%s", entries[i].case_name.c_str());
      std::snprintf(r.column, sizeof r.column, "%s", entries[i].column.c_str());
      r.rate = entries[i].rate;
      r.points = entries[i].points;
    }
    return WN_OK;
  });
}

wn_status wn_observability_constant(const wn_config* config, int nx, double* values, int* iterations,
                                    size_t capacity, size_t* count) {
  if (!config) return null_arg("config");
  if (nx < 1) return fail(WN_ERR_INVALID_ARGUMENT, "Nx must be positive");
  return guarded([&] {
    const auto& cases = config->preset.cases;
    if (count) *count = cases.size();
    if (!values) return WN_OK;
    if (capacity < cases.size()) return fail(WN_ERR_BUFFER_TOO_SMALL, "value buffer too small");
    for (size_t i = 0; i < cases.size(); ++i) {
      const wavenull::EigenEstimate e =
          wavenull::observability_for(wavenull::with_mesh(cases[i].second, nx, config->options));
      values[i] = e.value;
      if (iterations) iterations[i] = e.iterations;
    }
    return WN_OK;
  });
}

const char* wn_config_case_name(const wn_config* config, size_t index) {
  if (!config || index >= config->preset.cases.size()) return nullptr;
  return config->preset.cases[index].first.c_str();
}

}  // extern "C"
