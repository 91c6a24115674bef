#ifndef MMC_MMC_H
#define MMC_MMC_H

/* C interface of the MMC drive simulator. Every call returns an mmc_status;
 * on failure mmc_last_error() describes it (per thread, valid until the next
 * failing call on that thread). Runs are opaque handles released with
 * mmc_run_free. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define MMC_API __declspec(dllexport)
#else
#define MMC_API __attribute__((visibility("default")))
#endif

typedef enum mmc_status {
  MMC_OK = 0,
  MMC_ERR_ARGUMENT = 1,
  MMC_ERR_FILE_NOT_FOUND = 2,
  MMC_ERR_CONFIG = 3,     /* parse or schema error; message starts with the field path */
  MMC_ERR_VALIDATION = 4, /* values out of range */
  MMC_ERR_SIMULATION = 5, /* non-finite state during a run */
  MMC_ERR_IO = 6,
  MMC_ERR_INTERNAL = 7
} mmc_status;

typedef enum mmc_command {
  MMC_CMD_SIMULATE = 0,
  MMC_CMD_SWEEP_FREQUENCY = 1,
  MMC_CMD_SWEEP_D = 2,
  MMC_CMD_PREDICT = 3
} mmc_command;

typedef struct mmc_options {
  const char* out_dir;   /* NULL -> current directory */
  double dt;             /* <= 0 keeps the scenario step */
  double window;         /* trailing metrics window [s]; <= 0 keeps the configured one */
  int write_timeseries;  /* nonzero writes the time-series CSV */
  unsigned threads;      /* sweep workers; 0 -> hardware concurrency */
} mmc_options;

typedef struct mmc_metrics {
  double cvr_pp;
  double cc_peak;
  double arm_i_peak;
  double arm_i_rms;
  double line_i_peak;
  double t0;
  double t1;
} mmc_metrics;

typedef struct mmc_run mmc_run;

MMC_API const char* mmc_version(void);
MMC_API const char* mmc_last_error(void);
MMC_API const char* mmc_status_name(mmc_status status);

/* Fills defaults: out_dir ".", no overrides, time series on. */
MMC_API void mmc_options_init(mmc_options* options);

/* Parses a command name ("simulate", "sweep-frequency", "sweep-d", "predict"). */
MMC_API mmc_status mmc_command_from_name(const char* name, mmc_command* out);

/* Loads the scenario file, runs the command and writes its outputs. */
MMC_API mmc_status mmc_run_command(mmc_command command, const char* config_path, const mmc_options* options,
                                   mmc_run** out);
MMC_API void mmc_run_free(mmc_run* run);

/* Human-readable result table. */
MMC_API const char* mmc_run_report(const mmc_run* run);
MMC_API const char* mmc_run_summary_path(const mmc_run* run);
MMC_API size_t mmc_run_csv_count(const mmc_run* run);
MMC_API const char* mmc_run_csv_path(const mmc_run* run, size_t index);

/* Main-window metrics of a simulate run. */
MMC_API mmc_status mmc_run_metrics(const mmc_run* run, mmc_metrics* out);
/* Number of rows of a sweep, and one column value of a row by CSV header name. */
MMC_API size_t mmc_run_row_count(const mmc_run* run);
MMC_API mmc_status mmc_run_row_value(const mmc_run* run, size_t row, const char* column, double* out);

/* Closed-form half ripple at an operating point with default converter parameters. */
MMC_API mmc_status mmc_predicted_ripple(double f_s, double m_a, double i_peak, double phi, double* dv_out);

#ifdef __cplusplus
}
#endif

#endif
