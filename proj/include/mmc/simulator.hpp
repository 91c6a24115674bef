#pragma once

// Fixed-step switched model of the three-phase MMC.
//
// Each leg is driven by a prescribed load current i_s and integrates its
// common-mode current from 2L di_circ/dt = V_dc - v_u - v_l - 2r i_circ
// (backward Euler on the resistive term). Arm voltages come from per-SM
// capacitor states selected by phase-shifted-carrier PWM and sorting-based
// balancing; a PI loop with inductor-voltage feedforward makes i_circ track
// i_xd + i_xh plus a slow leg-energy correction.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmc/core_model.hpp"

namespace mmc {

/// Phase-shifted carrier set of one arm: N unit triangles offset by 1/N of
/// a carrier period.
class PwmCarriers {
 public:
  PwmCarriers(int n_sm, double f_carrier);

  /// Carrier k value in [0, 1] at time t.
  double carrier(int k, double t) const;
  int n_sm() const { return n_sm_; }
  double frequency() const { return f_carrier_; }
  /// Index of the carrier period containing t.
  std::int64_t period_index(double t) const;

 private:
  int n_sm_;
  double f_carrier_;
};

/// Number of carriers lying below the normalized reference (clamped to
/// [0, 1]), i.e. the number of SMs to insert.
int pwm_insertion_count(double v_ref_normalized, const PwmCarriers& carriers, double t);

/// Sorting-based SM selection. With full_resort the n_insert lowest (i_arm
/// > 0) or highest (i_arm <= 0) voltages are inserted, ties broken by index.
/// Otherwise the current selection is adjusted incrementally by adding or
/// removing the most suitable SMs. Returns the number of SM state changes.
int balance_select(ArmState& arm, int n_insert, double i_arm, bool full_resort);

struct CcControllerGains {
  double kp = 0.0;     // [V/A]
  double ki = 0.0;     // [V/(A s)]
  double limit = 0.0;  // output limit [V]
};

/// Default tuning: kp = 2L w_bw, ki = kp r / L, limit = cc_limit_fraction V_dc,
/// with w_bw = 2 pi f_carrier / 10 unless overridden.
CcControllerGains default_cc_gains(const ConverterParams& params, const ControlConfig& control);

/// PI controller for the leg common-mode current. The output v_corr is the
/// total leg voltage correction; each arm reference is reduced by v_corr / 2.
struct CcControllerState {
  CcControllerGains gains;
  double integrator = 0.0;  // [V], clamped to +/- limit
};

/// One PI update on error (i_ref - i_meas). Returns the clamped PI output.
double cc_controller_update(CcControllerState& ctrl, double i_circ_ref, double i_circ_meas, double dt);

/// Decimated time series of a run. Per-phase and per-arm columns are stored
/// column-wise; SM voltages are stored sample-major as floats
/// (sample * 6N + arm * N + sm, arm order au, al, bu, bl, cu, cl).
struct RunRecord {
  struct ArmSeries {
    std::vector<double> vc_min, vc_mean, vc_max;
    std::vector<int> n_insert;
  };
  struct PhaseSeries {
    std::vector<double> i_s, i_circ, i_u, i_l, i_h_ref, i_h_realized, v_h_ref;
    ArmSeries upper, lower;
  };

  std::vector<double> t;
  std::vector<double> f_s;
  std::array<PhaseSeries, 3> phases;
  std::vector<float> sm_voltages;
  int n_sm = 0;
  double f_h = 0.0;
  double sample_dt = 0.0;
  std::uint64_t reference_saturations = 0;  // arm references clamped to [0, N V_c]
  std::uint64_t command_saturations = 0;    // commanded voltage beyond available arm voltage
  std::uint64_t headroom_exhausted_steps = 0;
  std::uint64_t switching_events = 0;

  std::size_t size() const { return t.size(); }
  float sm_voltage(std::size_t sample, int arm, int sm) const {
    return sm_voltages[sample * static_cast<std::size_t>(6 * n_sm) + static_cast<std::size_t>(arm * n_sm + sm)];
  }
  /// Recomputes i_h_realized = i_circ minus its moving average over one
  /// injection period (centered; truncated at the record edges).
  void compute_realized_injection();
};

/// One recorded step kept for post-mortem diagnostics.
struct StepSnapshot {
  double t = 0.0;
  std::array<double, 3> i_circ{};
  std::array<double, 6> v_arm_inserted{};
  std::array<double, 6> v_arm_min{};
};

class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, std::vector<StepSnapshot> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<StepSnapshot>& history() const noexcept { return history_; }

 private:
  std::vector<StepSnapshot> history_;
};

/// Per-step quantities exposed for invariant checks.
struct StepTrace {
  std::array<double, 6> i_arm{};       // arm currents used for the capacitor update
  std::array<double, 6> v_inserted{};  // inserted arm voltage during the step
  std::array<double, 3> i_s{};
  std::array<double, 3> i_circ_ref{};
  std::array<double, 3> v_xh{};
  std::array<double, 3> i_xh{};
  std::array<double, 3> v_xs{};
  std::array<double, 3> i_xd{};
};

/// Schedule lookup: operating point, injection request and slope at time t.
struct ScheduledPoint {
  OperatingPoint op;
  bool injection_enabled = false;
  double d = 0.0;
};
ScheduledPoint schedule_at(const Scenario& s, double t);

class Simulator {
 public:
  /// The scenario must already satisfy validate_scenario.
  explicit Simulator(Scenario scenario);

  /// Advances the state by one dt. Throws SimulationError on non-finite state.
  void step();

  const ConverterState& state() const { return state_; }
  const StepTrace& last_step() const { return trace_; }
  const Scenario& scenario() const { return scenario_; }
  bool injection_active() const { return injection_active_; }
  double active_d() const { return d_active_; }
  std::int64_t steps_taken() const { return steps_; }

  /// Runs all segments and returns the decimated record.
  RunRecord run();

  /// Overrides the controller state (tests).
  CcControllerState& controller(int phase) { return ctrl_[phase]; }

 private:
  void record_sample(RunRecord& rec) const;
  void push_history();
  double balance_average(int phase, double sample, double f_s);

  Scenario scenario_;
  ConverterState state_;
  PwmCarriers carriers_;
  std::array<CcControllerState, 3> ctrl_;
  bool injection_active_ = false;
  bool at_zero_crossing_ = true;
  double d_active_ = 0.0;
  std::int64_t steps_ = 0;
  std::int64_t last_period_ = -1;
  // Running prefix sums of the upper-minus-lower arm RMS voltage; the
  // difference of two entries gives its moving average over one
  // fundamental period.
  std::vector<double> balance_prefix_[3];
  std::size_t balance_head_ = 0;
  StepTrace trace_;
  std::uint64_t ref_saturations_ = 0;
  std::uint64_t cmd_saturations_ = 0;
  std::uint64_t headroom_steps_ = 0;
  std::uint64_t switching_ = 0;
  std::vector<StepSnapshot> history_;  // ring buffer of the last 100 steps
  std::size_t history_pos_ = 0;
};

/// Runs a scenario from the nominal initial state. A zero-duration scenario
/// yields an empty record.
RunRecord run_scenario(const Scenario& scenario);

/// Thrown when a metrics window is invalid or too short.
class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Steady-state metrics over [t0, t1]. The window must lie inside the record
/// and span at least 5 fundamental periods (using the lowest f_s in it).
SummaryMetrics extract_metrics(const RunRecord& record, double t0, double t1);

/// Largest peak-to-peak SM voltage over [t0, t1]; no minimum window length.
double cvr_pp_in_window(const RunRecord& record, double t0, double t1);

}  // namespace mmc
