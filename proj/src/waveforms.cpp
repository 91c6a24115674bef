#include "mmc/waveforms.hpp"

#include <algorithm>
#include <cmath>

namespace mmc {

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a value just below a multiple of 2pi can round up to 2pi.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double modulation_signal(const OperatingPoint& op, double v_dc, double theta) {
  return op.m_a * (v_dc / 2.0) * std::sin(theta);
}

double output_current(const OperatingPoint& op, double theta) { return op.i_peak * std::sin(theta - op.phi); }

double baseline_circulating_current(double v_xs, double i_xs, double v_dc) { return v_xs * i_xs / v_dc; }

double kc_taper(double m_a, double kc_lo, double kc_hi) {
  if (m_a <= kc_lo) return 1.0;
  if (m_a >= kc_hi) return 0.0;
  return (kc_hi - m_a) / (kc_hi - kc_lo);
}

double scaling_factor_k(Technique technique, double d) {
  switch (technique) {
    case Technique::SineSine: return 2.0;
    case Technique::SquareSine: return kPi / 2.0;
    case Technique::SquareSquare: return 1.0;
    case Technique::SquareTrapezoid: return 1.0 / (1.0 - 0.5 * d);
    case Technique::None: return 0.0;
  }
  return 0.0;
}

InjectionEnvelope injection_envelope(const OperatingPoint& op, double v_xs, double i_xs, double i_xd,
                                     const InjectionConfig& cfg, double d, const ConverterParams& params) {
  InjectionEnvelope env;
  env.k = scaling_factor_k(cfg.technique, d);
  env.k_c = kc_taper(op.m_a, cfg.kc_lo, cfg.kc_hi);
  env.v_h = 0.5 * params.v_dc * (1.0 - op.m_a);
  if (env.v_h < cfg.headroom_floor * params.v_dc || cfg.technique == Technique::None) {
    env.headroom_exhausted = cfg.technique != Technique::None;
    env.v_h = 0.0;
    env.i_h = 0.0;
    return env;
  }
  const double numerator = 0.25 * params.v_dc * i_xs - v_xs * i_xd;
  env.sign = numerator < 0.0 ? -1.0 : 1.0;
  env.i_h = env.k * env.k_c * std::abs(numerator) / env.v_h;
  return env;
}

double trapezoid_unit(double theta_h, double d) {
  const double u = wrap_angle(theta_h) / kTwoPi;  // fraction of the period
  const double half = u < 0.5 ? u : u - 0.5;
  const double ramp = d / 4.0;
  double value = 1.0;
  if (half < ramp)
    value = half / ramp;
  else if (half > 0.5 - ramp)
    value = (0.5 - half) / ramp;
  return u < 0.5 ? value : -value;
}

double square_unit(double theta_h) { return wrap_angle(theta_h) < kPi ? 1.0 : -1.0; }

double sine_unit(double theta_h) { return std::sin(theta_h); }

double cmv_unit(Technique technique, double theta_h) {
  switch (technique) {
    case Technique::None: return 0.0;
    case Technique::SineSine: return sine_unit(theta_h);
    default: return square_unit(theta_h);
  }
}

double cc_unit(Technique technique, double theta_h, double d) {
  switch (technique) {
    case Technique::None: return 0.0;
    case Technique::SineSine:
    case Technique::SquareSine: return sine_unit(theta_h);
    case Technique::SquareSquare: return square_unit(theta_h);
    case Technique::SquareTrapezoid: return trapezoid_unit(theta_h, d);
  }
  return 0.0;
}

ArmReferences arm_references(double v_dc, double v_xs, double i_xs, double i_xd, const InjectionEnvelope& env,
                             double unit_cmv, double unit_cc, double arm_limit) {
  const double v_xh = env.v_h * unit_cmv;
  const double i_xh = env.signed_i_h() * unit_cc;
  ArmReferences r;
  r.v_upper = v_dc / 2.0 - v_xs - v_xh;
  r.v_lower = v_dc / 2.0 + v_xs + v_xh;
  r.i_upper = i_xs / 2.0 + i_xd + i_xh;
  r.i_lower = -i_xs / 2.0 + i_xd + i_xh;
  for (double* v : {&r.v_upper, &r.v_lower}) {
    if (*v < 0.0 || *v > arm_limit) {
      *v = std::clamp(*v, 0.0, arm_limit);
      ++r.saturations;
    }
  }
  return r;
}

}  // namespace mmc
