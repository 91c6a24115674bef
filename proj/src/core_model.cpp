#include "mmc/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mmc {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << "invalid scenario:";
  for (const auto& s : v) os << "\n  " << s;
  return os.str();
}

class Collector {
 public:
  template <typename... Args>
  void add(Args&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    out.push_back(os.str());
  }
  std::vector<std::string> out;
};

void check_op(Collector& c, const std::string& path, const OperatingPoint& op) {
  if (!(op.m_a >= 0.0 && op.m_a <= 1.0)) c.add(path, ".m_a = ", op.m_a, " outside [0, 1]");
  if (!(op.f_s >= 0.0)) c.add(path, ".f_s = ", op.f_s, " is negative");
  if (!(op.i_peak >= 0.0)) c.add(path, ".i_peak = ", op.i_peak, " is negative");
  if (!(std::abs(op.phi) <= kPi / 2.0)) c.add(path, ".phi = ", op.phi, " outside [-pi/2, pi/2]");
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

double ConverterParams::rated_modulation_index() const {
  const double phase_peak = v_line_rated * std::sqrt(2.0) / std::sqrt(3.0);
  return std::min(1.0, phase_peak / (v_dc / 2.0));
}

std::string_view to_string(Technique t) noexcept {
  switch (t) {
    case Technique::None: return "none";
    case Technique::SineSine: return "sine_sine";
    case Technique::SquareSine: return "square_sine";
    case Technique::SquareSquare: return "square_square";
    case Technique::SquareTrapezoid: return "square_trapezoid";
  }
  return "none";
}

Technique technique_from_string(std::string_view name) {
  for (auto t : {Technique::None, Technique::SineSine, Technique::SquareSine, Technique::SquareSquare,
                 Technique::SquareTrapezoid}) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown injection technique '" + std::string(name) + "'");
}

double Scenario::duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

double ArmState::inserted_voltage() const {
  double v = 0.0;
  for (const auto& sm : sms)
    if (sm.inserted) v += sm.v_c;
  return v;
}

double ArmState::total_voltage() const {
  double v = 0.0;
  for (const auto& sm : sms) v += sm.v_c;
  return v;
}

double ConverterState::i_dc() const { return legs[0].i_circ + legs[1].i_circ + legs[2].i_circ; }

ConverterState initial_state(const ConverterParams& params) {
  ConverterState s;
  for (auto& leg : s.legs) {
    leg.upper.sms.assign(static_cast<std::size_t>(params.n_sm), SubmoduleState{params.v_c_init, false});
    leg.lower.sms = leg.upper.sms;
  }
  return s;
}

const Scenario& validate_scenario(const Scenario& s) {
  Collector c;
  const auto& p = s.params;
  if (!(p.v_dc > 0)) c.add("params.v_dc = ", p.v_dc, " must be > 0");
  if (p.n_sm < 2) c.add("params.n_sm = ", p.n_sm, " must be >= 2");
  if (!(p.c_sm > 0)) c.add("params.c_sm = ", p.c_sm, " must be > 0");
  if (!(p.l_arm > 0)) c.add("params.l_arm = ", p.l_arm, " must be > 0");
  if (!(p.r_arm >= 0)) c.add("params.r_arm = ", p.r_arm, " must be >= 0");
  if (!(p.f_carrier > 0)) c.add("params.f_carrier = ", p.f_carrier, " must be > 0");
  if (!(p.f_rated > 0)) c.add("params.f_rated = ", p.f_rated, " must be > 0");
  if (!(p.v_c_init > 0)) c.add("params.v_c_init = ", p.v_c_init, " must be > 0");
  if (!(p.v_c_init * p.n_sm >= p.v_dc))
    c.add("params: arm cannot block DC link (n_sm * v_c_init = ", p.v_c_init * p.n_sm, " < v_dc = ", p.v_dc, ")");

  const auto& inj = s.injection;
  const bool trapezoid_used = inj.technique == Technique::SquareTrapezoid;
  if (!(inj.d_min >= 0.0 && inj.d_min <= 1.0)) c.add("injection.d_min = ", inj.d_min, " outside [0, 1]");
  if (trapezoid_used) {
    if (inj.d < inj.d_min) c.add("injection.d = ", inj.d, " below d_min = ", inj.d_min);
    if (inj.d > 1.0) c.add("injection.d = ", inj.d, " above 1");
  }
  if (!(inj.kc_lo >= 0.0 && inj.kc_lo < inj.kc_hi && inj.kc_hi <= 1.0))
    c.add("injection: kc_lo = ", inj.kc_lo, ", kc_hi = ", inj.kc_hi, " violate 0 <= kc_lo < kc_hi <= 1");
  if (!(inj.headroom_floor >= 0.0 && inj.headroom_floor < 0.5))
    c.add("injection.headroom_floor = ", inj.headroom_floor, " outside [0, 0.5)");
  if (!(inj.f_h > 0)) c.add("injection.f_h = ", inj.f_h, " must be > 0");
  if (!(inj.f_h < p.f_carrier))
    c.add("injection.f_h = ", inj.f_h, " must be below params.f_carrier = ", p.f_carrier);

  if (s.segments.empty()) c.add("segments: at least one segment required");
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const auto& seg = s.segments[i];
    const std::string path = "segments[" + std::to_string(i) + "]";
    if (!(seg.duration >= 0.0)) c.add(path, ".duration = ", seg.duration, " is negative");
    check_op(c, path + ".start", seg.start);
    check_op(c, path + ".end", seg.end);
    for (const auto* op : {&seg.start, &seg.end}) {
      if (inj.technique != Technique::None && !(inj.f_h > op->f_s)) {
        c.add(path, ": injection.f_h = ", inj.f_h, " must exceed f_s = ", op->f_s);
        break;
      }
    }
    if (seg.d) {
      if (*seg.d < inj.d_min) c.add(path, ".d = ", *seg.d, " below d_min = ", inj.d_min);
      if (*seg.d > 1.0) c.add(path, ".d = ", *seg.d, " above 1");
    }
  }
  if (!(s.duration() > 0.0)) c.add("segments: total duration must be > 0");

  if (!(s.dt > 0.0)) c.add("dt = ", s.dt, " must be > 0");
  else if (!(s.dt <= 1.0 / (20.0 * p.f_carrier)))
    c.add("dt = ", s.dt, " exceeds 1/(20 f_carrier) = ", 1.0 / (20.0 * p.f_carrier));
  if (s.record_decimation < 1) c.add("record_decimation = ", s.record_decimation, " must be >= 1");

  const auto& ctl = s.control;
  if (!(ctl.cc_limit_fraction > 0.0 && ctl.cc_limit_fraction <= 1.0))
    c.add("control.cc_limit_fraction = ", ctl.cc_limit_fraction, " outside (0, 1]");
  if (!(ctl.energy_gain >= 0.0)) c.add("control.energy_gain = ", ctl.energy_gain, " is negative");
  if (!(ctl.balance_gain >= 0.0)) c.add("control.balance_gain = ", ctl.balance_gain, " is negative");
  if (!(ctl.balance_gain_hf >= 0.0)) c.add("control.balance_gain_hf = ", ctl.balance_gain_hf, " is negative");
  if (!(ctl.cc_bandwidth_hz >= 0.0)) c.add("control.cc_bandwidth_hz = ", ctl.cc_bandwidth_hz, " is negative");

  if (!c.out.empty()) throw ValidationError(std::move(c.out));
  return s;
}

OperatingPoint rated_operating_point(const ConverterParams& params, double load_fraction) {
  if (!(load_fraction > 0.0 && load_fraction <= 1.0))
    throw std::invalid_argument("load_fraction must lie in (0, 1]");
  return OperatingPoint{params.f_rated, params.rated_modulation_index(), params.i_peak_full_load * load_fraction,
                        kDefaultPhi};
}

OperatingPoint vf_operating_point(const ConverterParams& params, double speed_fraction, double load_fraction,
                                  double phi) {
  if (!(speed_fraction >= 0.0)) throw std::invalid_argument("speed_fraction must be >= 0");
  OperatingPoint op = rated_operating_point(params, load_fraction);
  op.f_s = params.f_rated * speed_fraction;
  op.m_a = std::min(1.0, op.m_a * speed_fraction);
  op.phi = phi;
  return op;
}

OperatingPoint vf_scale(const OperatingPoint& op, double alpha) {
  OperatingPoint out = op;
  out.f_s = op.f_s * alpha;
  out.m_a = std::min(1.0, op.m_a * alpha);
  return out;
}

OperatingPoint lerp(const OperatingPoint& a, const OperatingPoint& b, double alpha) {
  auto mix = [alpha](double x, double y) { return x + (y - x) * alpha; };
  return OperatingPoint{mix(a.f_s, b.f_s), mix(a.m_a, b.m_a), mix(a.i_peak, b.i_peak), mix(a.phi, b.phi)};
}

}  // namespace mmc
