#include "mmc/mmc.h"

#include <cstring>
#include <string>
#include <string_view>
#include <variant>

#include "mmc/ripple_analysis.hpp"
#include "mmc/runner.hpp"

struct mmc_run {
  mmc_command command;
  std::variant<mmc::SimulateResult, mmc::FrequencySweepResult, mmc::DSweepResult, mmc::Prediction> result;
  std::string report;
  mmc::RunManifest manifest;
};

namespace {

thread_local std::string g_last_error;

mmc_status fail(mmc_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
mmc_status guarded(F&& fn) {
  try {
    return fn();
  } catch (const mmc::FileNotFoundError& e) {
    return fail(MMC_ERR_FILE_NOT_FOUND, e.what());
  } catch (const mmc::ConfigError& e) {
    return fail(MMC_ERR_CONFIG, e.what());
  } catch (const mmc::ValidationError& e) {
    return fail(MMC_ERR_VALIDATION, e.what());
  } catch (const mmc::MetricsError& e) {
    return fail(MMC_ERR_VALIDATION, e.what());
  } catch (const mmc::SimulationError& e) {
    return fail(MMC_ERR_SIMULATION, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(MMC_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(MMC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MMC_ERR_INTERNAL, "unknown error");
  }
}

// Row lookup by the CSV header names of each sweep table.
bool row_value(const mmc::FrequencyRow& r, std::string_view c, double& v) {
  if (c == "f_s") v = r.f_s;
  else if (c == "dv_analytic") v = r.dv_analytic;
  else if (c == "cvr_pp_analytic") v = r.cvr_pp_analytic;
  else if (c == "dv_pct") v = r.dv_pct;
  else if (c == "cvr_pp_sim") v = r.cvr_pp_sim;
  else if (c == "cvr_pct_sim") v = r.cvr_pct_sim;
  else return false;
  return true;
}

bool row_value(const mmc::DRow& r, std::string_view c, double& v) {
  if (c == "d") v = r.d;
  else if (c == "k") v = r.k;
  else if (c == "i_h_theory") v = r.i_h_theory;
  else if (c == "i_h_sim") v = r.i_h_sim;
  else if (c == "cc_peak") v = r.cc_peak;
  else if (c == "cvr_pp") v = r.cvr_pp;
  else if (c == "arm_i_peak") v = r.arm_i_peak;
  else return false;
  return true;
}

bool row_value(const mmc::DStep& r, std::string_view c, double& v) {
  if (c == "step") v = r.index;
  else if (c == "t_change") v = r.t_change;
  else if (c == "d") v = r.d;
  else if (c == "settling_time") v = r.settling_time;
  else if (c == "cc_peak") v = r.cc_peak;
  else if (c == "cvr_pp") v = r.cvr_pp;
  else return false;
  return true;
}

bool row_value(const mmc::KdTableRow& r, std::string_view c, double& v) {
  if (c == "d") v = r.d;
  else if (c == "k") v = r.k;
  else if (c == "reduction") v = r.reduction;
  else return false;
  return true;
}

}  // namespace

extern "C" {

const char* mmc_version(void) { return mmc::kEngineVersion; }

const char* mmc_last_error(void) { return g_last_error.c_str(); }

const char* mmc_status_name(mmc_status status) {
  switch (status) {
    case MMC_OK: return "ok";
    case MMC_ERR_ARGUMENT: return "invalid argument";
    case MMC_ERR_FILE_NOT_FOUND: return "file not found";
    case MMC_ERR_CONFIG: return "configuration error";
    case MMC_ERR_VALIDATION: return "validation error";
    case MMC_ERR_SIMULATION: return "simulation error";
    case MMC_ERR_IO: return "i/o error";
    case MMC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void mmc_options_init(mmc_options* options) {
  if (!options) return;
  *options = mmc_options{".", 0.0, 0.0, 1, 0};
}

mmc_status mmc_command_from_name(const char* name, mmc_command* out) {
  if (!name || !out) return fail(MMC_ERR_ARGUMENT, "null argument");
  const std::string_view n = name;
  if (n == "simulate") *out = MMC_CMD_SIMULATE;
  else if (n == "sweep-frequency") *out = MMC_CMD_SWEEP_FREQUENCY;
  else if (n == "sweep-d") *out = MMC_CMD_SWEEP_D;
  else if (n == "predict") *out = MMC_CMD_PREDICT;
  else return fail(MMC_ERR_ARGUMENT, "unknown command '" + std::string(n) + "'");
  return MMC_OK;
}

mmc_status mmc_run_command(mmc_command command, const char* config_path, const mmc_options* options, mmc_run** out) {
  if (!config_path || !out) return fail(MMC_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    mmc_options o;
    mmc_options_init(&o);
    if (options) o = *options;
    mmc::RunOptions opt;
    if (o.out_dir) opt.out_dir = o.out_dir;
    if (o.dt > 0.0) opt.dt = o.dt;
    if (o.window > 0.0) opt.window_length = o.window;
    opt.write_timeseries = o.write_timeseries != 0;
    opt.threads = o.threads;

    const mmc::RunConfig cfg = mmc::load_config(config_path);
    auto run = std::make_unique<mmc_run>();
    run->command = command;
    switch (command) {
      case MMC_CMD_SIMULATE: {
        auto r = mmc::cmd_simulate(cfg, opt);
        run->report = mmc::format_summary(r);
        run->manifest = r.manifest;
        run->result = std::move(r);
        break;
      }
      case MMC_CMD_SWEEP_FREQUENCY: {
        auto r = mmc::cmd_sweep_frequency(cfg, opt);
        run->report = mmc::format_frequency_sweep(r);
        run->manifest = r.manifest;
        run->result = std::move(r);
        break;
      }
      case MMC_CMD_SWEEP_D: {
        auto r = mmc::cmd_sweep_d(cfg, opt);
        run->report = mmc::format_d_sweep(r);
        run->manifest = r.manifest;
        run->result = std::move(r);
        break;
      }
      case MMC_CMD_PREDICT: {
        auto r = mmc::cmd_predict(cfg, opt);
        run->report = mmc::format_prediction(r);
        run->manifest = r.manifest;
        run->result = std::move(r);
        break;
      }
      default:
        return fail(MMC_ERR_ARGUMENT, "unknown command");
    }
    *out = run.release();
    return MMC_OK;
  });
}

void mmc_run_free(mmc_run* run) { delete run; }

const char* mmc_run_report(const mmc_run* run) { return run ? run->report.c_str() : ""; }

const char* mmc_run_summary_path(const mmc_run* run) { return run ? run->manifest.summary_path.c_str() : ""; }

size_t mmc_run_csv_count(const mmc_run* run) { return run ? run->manifest.csv_paths.size() : 0; }

const char* mmc_run_csv_path(const mmc_run* run, size_t index) {
  if (!run || index >= run->manifest.csv_paths.size()) return nullptr;
  return run->manifest.csv_paths[index].c_str();
}

mmc_status mmc_run_metrics(const mmc_run* run, mmc_metrics* out) {
  if (!run || !out) return fail(MMC_ERR_ARGUMENT, "null argument");
  const auto* r = std::get_if<mmc::SimulateResult>(&run->result);
  if (!r) return fail(MMC_ERR_ARGUMENT, "metrics are only available for simulate runs");
  const auto& m = r->metrics;
  *out = {m.cvr_pp, m.cc_peak, m.arm_i_peak, m.arm_i_rms, m.line_i_peak, m.t0, m.t1};
  return MMC_OK;
}

size_t mmc_run_row_count(const mmc_run* run) {
  if (!run) return 0;
  return std::visit(
      [](const auto& r) -> size_t {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, mmc::FrequencySweepResult>) return r.rows.size();
        else if constexpr (std::is_same_v<T, mmc::DSweepResult>) return r.rows.empty() ? r.steps.size() : r.rows.size();
        else if constexpr (std::is_same_v<T, mmc::Prediction>) return r.kd_table.size();
        else return 0;
      },
      run->result);
}

mmc_status mmc_run_row_value(const mmc_run* run, size_t row, const char* column, double* out) {
  if (!run || !column || !out) return fail(MMC_ERR_ARGUMENT, "null argument");
  if (row >= mmc_run_row_count(run)) return fail(MMC_ERR_ARGUMENT, "row index out of range");
  const bool found = std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, mmc::FrequencySweepResult>) return row_value(r.rows[row], column, *out);
        else if constexpr (std::is_same_v<T, mmc::DSweepResult>)
          return r.rows.empty() ? row_value(r.steps[row], column, *out) : row_value(r.rows[row], column, *out);
        else if constexpr (std::is_same_v<T, mmc::Prediction>) return row_value(r.kd_table[row], column, *out);
        else return false;
      },
      run->result);
  if (!found) return fail(MMC_ERR_ARGUMENT, std::string("no column '") + column + "'");
  return MMC_OK;
}

mmc_status mmc_predicted_ripple(double f_s, double m_a, double i_peak, double phi, double* dv_out) {
  if (!dv_out) return fail(MMC_ERR_ARGUMENT, "null argument");
  if (!(f_s > 0.0) || !(m_a >= 0.0 && m_a <= 1.0) || !(i_peak >= 0.0))
    return fail(MMC_ERR_ARGUMENT, "need f_s > 0, m_a in [0, 1], i_peak >= 0");
  return guarded([&] {
    *dv_out = mmc::predicted_cvr(mmc::ConverterParams{}, mmc::OperatingPoint{f_s, m_a, i_peak, phi});
    return MMC_OK;
  });
}

}  // extern "C"
