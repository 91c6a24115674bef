#pragma once

// Shared domain types for the MMC drive model: converter ratings, operating
// points, injection configuration, scenarios and the integrated converter
// state. Nothing here simulates; it only validates and derives quantities.

#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mmc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Thrown by validate_scenario. Carries one message per violated invariant,
/// each prefixed with the field path.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Electrical ratings of the converter plus the motor rating anchors used to
/// derive V/f operating points.
struct ConverterParams {
  double v_dc = 7000.0;       // DC link [V]
  int n_sm = 20;              // submodules per arm
  double c_sm = 8e-3;         // submodule capacitance [F]
  double l_arm = 1e-3;        // arm inductance [H]
  double r_arm = 0.1;         // arm resistance [ohm]
  double f_carrier = 500.0;   // PWM carrier [Hz]
  double v_c_init = 350.0;    // nominal submodule voltage [V]
  double f_rated = 60.0;      // rated stator frequency [Hz]
  double v_line_rated = 4160.0;     // motor rated line voltage [V rms]
  double i_peak_full_load = 250.0;  // line current peak at full torque [A]

  /// Modulation index at rated frequency: rated phase peak over V_dc/2,
  /// clamped to 1.
  double rated_modulation_index() const;
};

struct OperatingPoint {
  double f_s = 0.0;     // fundamental [Hz]
  double m_a = 0.0;     // modulation index
  double i_peak = 0.0;  // line current peak [A]
  double phi = 0.0;     // power-factor angle [rad]
};

enum class Technique : std::uint8_t {
  None,
  SineSine,         // sine CMV, sine CC
  SquareSine,       // square CMV, sine CC
  SquareSquare,     // square CMV, square CC
  SquareTrapezoid,  // square CMV, variable-slope trapezoidal CC
};

std::string_view to_string(Technique t) noexcept;
/// Accepts the snake_case names produced by to_string. Throws
/// std::invalid_argument on unknown names.
Technique technique_from_string(std::string_view name);

struct InjectionConfig {
  Technique technique = Technique::None;
  double d = 0.2;
  double d_min = 0.04;
  double f_h = 100.0;    // injection frequency [Hz]
  double kc_lo = 0.0;    // k_c = 1 at or below this m_a
  double kc_hi = 1.0;    // k_c = 0 at or above this m_a
  double headroom_floor = 0.01;  // minimum V_h as a fraction of V_dc
};

/// Circulating-current loop and leg energy regulation. Zero/negative
/// bandwidth or gains fall back to the defaults derived from the params.
struct ControlConfig {
  double cc_bandwidth_hz = 0.0;   // 0 -> f_carrier / 10
  double cc_limit_fraction = 0.1; // PI output limit as a fraction of V_dc
  bool cc_feedforward = true;     // add 2L di_xh/dt + 2r i_xh of the injected CC to the PI output
  bool cc_enabled = true;
  double energy_gain = 0.2;       // leg energy regulator [A/V]; 0 disables
  double balance_gain = 0.2;      // upper/lower balancing, fundamental part [A/V]; 0 disables
  double balance_gain_hf = 0.6;   // upper/lower balancing, injected-shape part [A/V]
  bool loss_feedforward = true;   // add r (i_u^2 + i_l^2) / V_dc to the CC reference
};

struct Segment {
  double duration = 0.0;
  OperatingPoint start;
  OperatingPoint end;
  bool injection_enabled = false;
  std::optional<double> d;  // overrides InjectionConfig::d for this segment
};

struct Scenario {
  std::string name;
  ConverterParams params;
  InjectionConfig injection;
  ControlConfig control;
  std::vector<Segment> segments;
  double dt = 5e-6;
  int record_decimation = 10;

  double duration() const;
};

struct SubmoduleState {
  double v_c = 0.0;
  bool inserted = false;
};

struct ArmState {
  std::vector<SubmoduleState> sms;
  int n_insert = 0;

  double inserted_voltage() const;
  double total_voltage() const;
};

struct LegState {
  double i_circ = 0.0;  // common-mode leg current, (i_u + i_l) / 2
  ArmState upper;
  ArmState lower;
};

/// Integrated simulator state. Arm currents are derived:
/// i_u = i_circ + i_s/2, i_l = i_circ - i_s/2, so i_u - i_l = i_s exactly.
struct ConverterState {
  LegState legs[3];
  double theta = 0.0;    // fundamental phase accumulator [rad]
  double theta_h = 0.0;  // injection phase accumulator, kept in [0, 2pi)
  double t = 0.0;

  /// DC link current: sum over phases of the leg common-mode current.
  double i_dc() const;
};

ConverterState initial_state(const ConverterParams& params);

struct SummaryMetrics {
  double cvr_pp = 0.0;      // max over SMs of peak-to-peak capacitor voltage [V]
  double cc_peak = 0.0;     // peak |realized injected CC| [A]
  double arm_i_peak = 0.0;  // [A]
  double arm_i_rms = 0.0;   // largest per-arm RMS [A]
  double line_i_peak = 0.0; // [A]
  double t0 = 0.0;
  double t1 = 0.0;

  bool operator==(const SummaryMetrics&) const = default;
};

/// Checks every invariant of the scenario and its parts. Returns the input
/// unchanged or throws ValidationError listing all violations.
const Scenario& validate_scenario(const Scenario& s);

/// Operating point at rated frequency for the given fraction of rated torque.
/// Current scales linearly with load (40 % -> 100 A at the default ratings).
OperatingPoint rated_operating_point(const ConverterParams& params, double load_fraction);

/// Constant-flux scaling of the rated point: f_s and m_a scale with
/// speed_fraction (m_a clamped to 1), current amplitude stays constant.
OperatingPoint vf_operating_point(const ConverterParams& params, double speed_fraction,
                                  double load_fraction, double phi);

/// Scales f_s by alpha and m_a by alpha (clamped to 1); i_peak and phi are
/// unchanged (constant torque, constant flux).
OperatingPoint vf_scale(const OperatingPoint& op, double alpha);

/// Linear interpolation of every field; alpha in [0, 1].
OperatingPoint lerp(const OperatingPoint& a, const OperatingPoint& b, double alpha);

/// Default power-factor angle for the prescribed-current load (32 degrees).
inline constexpr double kDefaultPhi = 32.0 * std::numbers::pi / 180.0;

}  // namespace mmc
