#pragma once

// Scenario files, command implementations and result persistence shared by
// the C API and the command-line tool.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mmc/core_model.hpp"
#include "mmc/simulator.hpp"

namespace mmc {

inline constexpr const char* kEngineVersion = "0.1.0";

/// Parse or schema error. The message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FileNotFoundError : public std::runtime_error {
 public:
  explicit FileNotFoundError(const std::filesystem::path& path)
      : std::runtime_error("file not found: " + path.string()), path_(path) {}
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

struct TimeWindow {
  double t0 = 0.0;
  double t1 = 0.0;
};

struct SweepConfig {
  std::vector<double> frequencies;   // sweep-frequency points [Hz]
  std::vector<double> d_values;      // sweep-d static points
  bool dynamic_steps = false;        // sweep-d: settle report for the scenario's own d steps
  double speed = 0.166;              // sweep-d operating point
  double load = 0.4;
  double phi = kDefaultPhi;
  double settle = 1.5;               // [s] before the measurement window
  double measure = 0.6;              // [s] minimum measurement window
  double measure_periods = 6.0;      // minimum window in fundamental periods
  double settle_tolerance = 0.05;    // relative band for step settling
};

struct RunConfig {
  std::string source;  // file the config came from, if any
  Scenario scenario;
  std::optional<TimeWindow> window;
  std::vector<std::pair<std::string, TimeWindow>> windows;  // extra named windows
  SweepConfig sweep;
};

/// Reads a YAML scenario file. Throws FileNotFoundError, ConfigError or
/// ValidationError.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<double> dt;
  std::optional<double> window_length;  // trailing window replacing the configured one
  bool write_timeseries = true;
  unsigned threads = 0;  // 0 -> hardware concurrency
};

struct RunManifest {
  std::string scenario_name;
  std::string scenario_path;
  std::string output_dir;
  std::vector<std::string> csv_paths;
  std::string summary_path;
  std::string engine_version = kEngineVersion;
  double wall_clock_s = 0.0;
};

struct RunCounters {
  std::uint64_t reference_saturations = 0;
  std::uint64_t command_saturations = 0;
  std::uint64_t headroom_exhausted_steps = 0;
  std::uint64_t switching_events = 0;
};

struct SimulateResult {
  SummaryMetrics metrics;
  std::vector<std::pair<std::string, SummaryMetrics>> windows;
  RunCounters counters;
  RunManifest manifest;
};

struct FrequencyRow {
  double f_s = 0.0;
  double dv_analytic = 0.0;       // half ripple from the closed form [V]
  double cvr_pp_analytic = 0.0;   // 2 * dv_analytic
  double dv_pct = 0.0;            // dv_analytic as % of V_c
  double cvr_pp_sim = 0.0;
  double cvr_pct_sim = 0.0;       // cvr_pp_sim as % of V_c
};

struct FrequencySweepResult {
  std::vector<FrequencyRow> rows;
  RunManifest manifest;
};

struct DRow {
  double d = 0.0;
  double k = 0.0;
  double i_h_theory = 0.0;  // envelope peak of the reference
  double i_h_sim = 0.0;     // least-squares amplitude of the realized CC
  double cc_peak = 0.0;
  double cvr_pp = 0.0;
  double arm_i_peak = 0.0;
};

struct DStep {
  int index = 0;
  double t_change = 0.0;
  double d = 0.0;
  double settling_time = 0.0;  // infinity when the band is never held
  double cc_peak = 0.0;
  double cvr_pp = 0.0;         // over the whole dwell, transient included
};

struct DSweepResult {
  std::vector<DRow> rows;
  std::vector<DStep> steps;
  RunManifest manifest;
};

struct KdTableRow {
  double d, k, reduction;
};

struct Prediction {
  OperatingPoint op;
  double dv = 0.0;
  double cvr_pp = 0.0;
  double v_h = 0.0;
  double i_h_peak = 0.0;
  double k = 0.0;
  double k_c = 0.0;
  std::vector<KdTableRow> kd_table;
  RunManifest manifest;
};

/// Applies the dt override and re-validates.
Scenario effective_scenario(const RunConfig& cfg, const RunOptions& opt);

/// Configured window, or the trailing window of the given length, or by
/// default the trailing max(0.5 s, 6 periods of the final f_s).
TimeWindow metrics_window(const RunConfig& cfg, const Scenario& s, std::optional<double> length);

SimulateResult cmd_simulate(const RunConfig& cfg, const RunOptions& opt);
FrequencySweepResult cmd_sweep_frequency(const RunConfig& cfg, const RunOptions& opt);
DSweepResult cmd_sweep_d(const RunConfig& cfg, const RunOptions& opt);
Prediction cmd_predict(const RunConfig& cfg, const RunOptions& opt);

/// Least-squares gain of the realized injected CC against its reference
/// over the window, times the reference envelope peak.
double injection_amplitude(const RunRecord& record, TimeWindow w);

/// Largest reference envelope |i_h| over one fundamental period.
double theoretical_injection_peak(const ConverterParams& params, const OperatingPoint& op,
                                  const InjectionConfig& cfg, double d);

/// Settling time of each d step in a run: the least-squares tracking gain of
/// the realized injected current against its reference, over a trailing
/// fundamental period, must stay within tolerance of its end-of-dwell value.
std::vector<DStep> d_step_report(const Scenario& s, const RunRecord& record, double tolerance);

void write_timeseries_csv(const RunRecord& record, const std::filesystem::path& path);

std::string summary_json(const SimulateResult& r);
/// Reads back a summary written by summary_json.
SimulateResult parse_summary_json(const std::string& text);

std::string format_summary(const SimulateResult& r);
std::string format_frequency_sweep(const FrequencySweepResult& r);
std::string format_d_sweep(const DSweepResult& r);
std::string format_prediction(const Prediction& p);

}  // namespace mmc
