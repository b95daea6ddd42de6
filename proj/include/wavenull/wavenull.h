#ifndef WAVENULL_WAVENULL_H
#define WAVENULL_WAVENULL_H

/* C interface of libwavenull. All handles are opaque; every fallible call
 * returns a wn_status and leaves a message in wn_last_error() (per thread). */

#include <stddef.h>

#if defined(WAVENULL_BUILDING)
#define WN_API __attribute__((visibility("default")))
#else
#define WN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wn_status {
  WN_OK = 0,
  WN_ERR_INVALID_ARGUMENT = 1,
  WN_ERR_PARSE = 2,
  WN_ERR_INVALID_COEFFICIENT = 3,
  WN_ERR_INADMISSIBLE_COEFFICIENT = 4,
  WN_ERR_TIME_HORIZON = 5,
  WN_ERR_WEIGHT_OVERFLOW = 6,
  WN_ERR_DOMAIN = 7,
  WN_ERR_CONSTRAINT_VIOLATION = 8,
  WN_ERR_NOT_SPD = 9,
  WN_ERR_NO_CONVERGENCE = 10,
  WN_ERR_CFL = 11,
  WN_ERR_IO = 12,
  WN_ERR_BUFFER_TOO_SMALL = 13,
  WN_ERR_INTERNAL = 99
} wn_status;

/// A preset or configuration file plus run overrides.
typedef struct wn_config wn_config;
/// Rows of a finished run (or of a loaded report.csv).
typedef struct wn_report wn_report;

typedef struct wn_rate {
  char case_name[64];
  char column[32];
  double rate;
  int points;
} wn_rate;

WN_API const char* wn_version(void);
/// Message of the last failed call on this thread; "" when none.
WN_API const char* wn_last_error(void);
WN_API const char* wn_status_name(wn_status status);

WN_API size_t wn_preset_count(void);
/// NULL when out of range.
WN_API const char* wn_preset_id(size_t index);

WN_API wn_status wn_config_from_preset(const char* id, wn_config** out);
WN_API wn_status wn_config_from_file(const char* path, wn_config** out);
WN_API void wn_config_free(wn_config* config);

/// Mesh ladder (Nx values, strictly increasing).
WN_API wn_status wn_config_set_ladder(wn_config* config, const int* nx, size_t count);
/// Effective ladder (override or preset default).
WN_API wn_status wn_config_ladder(const wn_config* config, int* nx, size_t capacity, size_t* count);
/// Time cells for every mesh; 0 restores Nt = round(T Nx).
WN_API wn_status wn_config_set_nt(wn_config* config, int nt);
/// Reference Nx for error columns; 0 disables the reference.
WN_API wn_status wn_config_set_reference(wn_config* config, int nx);
/// Keys: "s", "lambda", "delta".
WN_API wn_status wn_config_set_double(wn_config* config, const char* key, double value);
/// "smoothstep" or "root".
WN_API wn_status wn_config_set_cutoff(wn_config* config, const char* shape);
/// Keys: "c0h", "kappa", "plot_data".
WN_API wn_status wn_config_set_flag(wn_config* config, const char* key, int value);
/// Writes the configuration of the first case in the text format accepted by
/// wn_config_from_file. `*written` receives the required size including NUL.
WN_API wn_status wn_config_describe(const wn_config* config, char* buffer, size_t capacity,
                                    size_t* written);

/// Runs the ladder. `out_dir` may be NULL (no files); threads >= 1.
WN_API wn_status wn_run(const wn_config* config, int threads, const char* out_dir, wn_report** out);
/// Reads `<dir>/report.csv`, or the file itself when `path` names a file.
WN_API wn_status wn_report_load(const char* path, wn_report** out);
WN_API void wn_report_free(wn_report* report);

WN_API size_t wn_report_row_count(const wn_report* report);
WN_API wn_status wn_report_row_info(const wn_report* report, size_t row, const char** case_name,
                                    int* nx, int* nt);
/// NaN when the quantity was not computed.
WN_API wn_status wn_report_value(const wn_report* report, size_t row, const char* column,
                                 double* value);
WN_API size_t wn_report_column_count(void);
WN_API const char* wn_report_column_name(size_t index);
WN_API wn_status wn_report_write_csv(const wn_report* report, const char* path);

/// Least-squares rates of the error columns. With `rates` NULL only the count
/// is returned.
WN_API wn_status wn_report_rates(const wn_report* report, wn_rate* rates, size_t capacity,
                                 size_t* count);

/// C_0h of every case of the configuration on the mesh with `nx` space cells
/// (Nt from the configuration override or round(T Nx)); `values` receives one
/// entry per case.
WN_API wn_status wn_observability_constant(const wn_config* config, int nx, double* values,
                                           int* iterations, size_t capacity, size_t* count);
/// Case name of entry `index` (the order used by wn_observability_constant).
WN_API const char* wn_config_case_name(const wn_config* config, size_t index);

#ifdef __cplusplus
}
#endif

#endif
