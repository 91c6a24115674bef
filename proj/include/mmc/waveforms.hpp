#pragma once

// Stateless reference-waveform generators: fundamental modulation and load
// current, baseline circulating current, the injection unit shapes and the
// injection envelope sizing. All functions are pure.

#include "mmc/core_model.hpp"

namespace mmc {

/// Phase offsets of the three legs: a = 0, b = -2pi/3, c = +2pi/3.
inline constexpr double kPhaseOffset[3] = {0.0, -kTwoPi / 3.0, kTwoPi / 3.0};

/// v_xs = m_a (V_dc/2) sin(theta). theta already includes the phase offset.
double modulation_signal(const OperatingPoint& op, double v_dc, double theta);

/// i_xs = I sin(theta - phi).
double output_current(const OperatingPoint& op, double theta);

/// i_xd = v_xs i_xs / V_dc.
double baseline_circulating_current(double v_xs, double i_xs, double v_dc);

/// Injection limiter: 1 below kc_lo, 0 above kc_hi, linear in between.
double kc_taper(double m_a, double kc_lo, double kc_hi);

/// Required CC scale factor for the technique's CMV/CC shape pair.
double scaling_factor_k(Technique technique, double d);

struct InjectionEnvelope {
  double v_h = 0.0;  // CMV peak [V]
  double i_h = 0.0;  // CC envelope magnitude [A]
  double k = 1.0;
  double k_c = 0.0;
  double sign = 1.0;  // sign of the ripple-power numerator; the CC flips with it
  bool headroom_exhausted = false;

  /// Signed CC amplitude, sign * i_h.
  double signed_i_h() const { return sign * i_h; }
};

/// Sizes the CMV peak from the remaining arm headroom and the CC envelope
/// from the instantaneous ripple power 0.25 V_dc i_xs - v_xs i_xd.
/// V_h = (V_dc/2)(1 - m_a). If V_h falls below headroom_floor * V_dc the
/// envelope is zeroed and headroom_exhausted is set.
InjectionEnvelope injection_envelope(const OperatingPoint& op, double v_xs, double i_xs, double i_xd,
                                     const InjectionConfig& cfg, double d, const ConverterParams& params);

/// Variable-slope trapezoid of unit height. Over one period it ramps 0 -> 1
/// during the first d/4 of the period, holds, ramps back to 0 at the half
/// period and mirrors negatively over the second half.
double trapezoid_unit(double theta_h, double d);

/// +1 on [0, pi), -1 on [pi, 2pi) after reduction mod 2pi.
double square_unit(double theta_h);

double sine_unit(double theta_h);

/// Unit CMV shape for the technique (zero for Technique::None).
double cmv_unit(Technique technique, double theta_h);

/// Unit CC shape for the technique (zero for Technique::None).
double cc_unit(Technique technique, double theta_h, double d);

struct ArmReferences {
  double v_upper = 0.0;
  double v_lower = 0.0;
  double i_upper = 0.0;
  double i_lower = 0.0;
  int saturations = 0;  // number of voltage references clamped
};

/// v_xu = V_dc/2 - v_xs - v_xh, v_xl = V_dc/2 + v_xs + v_xh,
/// i_xu = i_xs/2 + i_xd + i_xh, i_xl = -i_xs/2 + i_xd + i_xh
/// with v_xh = v_h * unit_cmv and i_xh = signed i_h * unit_cc.
/// Voltage references are clamped to [0, arm_limit].
ArmReferences arm_references(double v_dc, double v_xs, double i_xs, double i_xd, const InjectionEnvelope& env,
                             double unit_cmv, double unit_cc, double arm_limit);

/// Reduces an angle to [0, 2pi).
double wrap_angle(double theta);

}  // namespace mmc
