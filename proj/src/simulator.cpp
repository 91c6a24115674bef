#include "mmc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmc/waveforms.hpp"

namespace mmc {

namespace {

constexpr std::size_t kHistoryLength = 100;
constexpr double kMinBalanceFrequency = 1.0;

struct LegReference {
  double v_xs = 0.0;
  double i_xs = 0.0;
  double i_xd = 0.0;
  double v_xh = 0.0;
  double i_xh = 0.0;
  double v_upper = 0.0;
  double v_lower = 0.0;
  double i_circ = 0.0;  // i_xd + i_xh
  double v_h_peak = 0.0;
  double u_cc = 0.0;
  int saturations = 0;
  bool headroom_exhausted = false;
};

LegReference leg_reference(const Scenario& s, const OperatingPoint& op, Technique tech, double d, double theta,
                           double theta_h) {
  const auto& p = s.params;
  LegReference r;
  r.v_xs = modulation_signal(op, p.v_dc, theta);
  r.i_xs = output_current(op, theta);
  r.i_xd = baseline_circulating_current(r.v_xs, r.i_xs, p.v_dc);
  InjectionEnvelope env;
  double u_cmv = 0.0, u_cc = 0.0;
  if (tech != Technique::None) {
    InjectionConfig cfg = s.injection;
    cfg.technique = tech;
    env = injection_envelope(op, r.v_xs, r.i_xs, r.i_xd, cfg, d, p);
    r.headroom_exhausted = env.headroom_exhausted;
    u_cmv = cmv_unit(tech, theta_h);
    u_cc = cc_unit(tech, theta_h, d);
  }
  const ArmReferences arm =
      arm_references(p.v_dc, r.v_xs, r.i_xs, r.i_xd, env, u_cmv, u_cc, p.n_sm * p.v_c_init);
  r.v_h_peak = env.v_h;
  r.u_cc = u_cc;
  r.v_xh = env.v_h * u_cmv;
  r.i_xh = env.signed_i_h() * u_cc;
  r.v_upper = arm.v_upper;
  r.v_lower = arm.v_lower;
  r.i_circ = 0.5 * (arm.i_upper + arm.i_lower);
  r.saturations = arm.saturations;
  return r;
}

struct ArmStats {
  double min, mean, max, sum, sum_sq;
};

ArmStats arm_stats(const ArmState& arm) {
  ArmStats s{arm.sms.front().v_c, 0.0, arm.sms.front().v_c, 0.0, 0.0};
  for (const auto& sm : arm.sms) {
    s.min = std::min(s.min, sm.v_c);
    s.max = std::max(s.max, sm.v_c);
    s.sum += sm.v_c;
    s.sum_sq += sm.v_c * sm.v_c;
  }
  s.mean = s.sum / static_cast<double>(arm.sms.size());
  return s;
}

}  // namespace

CcControllerGains default_cc_gains(const ConverterParams& params, const ControlConfig& control) {
  const double f_bw = control.cc_bandwidth_hz > 0.0 ? control.cc_bandwidth_hz : params.f_carrier / 10.0;
  const double w_bw = kTwoPi * f_bw;
  CcControllerGains g;
  g.kp = 2.0 * params.l_arm * w_bw;
  g.ki = g.kp * (2.0 * params.r_arm) / (2.0 * params.l_arm);
  g.limit = control.cc_limit_fraction * params.v_dc;
  return g;
}

double cc_controller_update(CcControllerState& ctrl, double i_circ_ref, double i_circ_meas, double dt) {
  const auto& g = ctrl.gains;
  const double err = i_circ_ref - i_circ_meas;
  ctrl.integrator = std::clamp(ctrl.integrator + g.ki * err * dt, -g.limit, g.limit);
  return std::clamp(g.kp * err + ctrl.integrator, -g.limit, g.limit);
}

ScheduledPoint schedule_at(const Scenario& s, double t) {
  ScheduledPoint out;
  double start = 0.0;
  const Segment* seg = nullptr;
  double alpha = 1.0;
  for (const auto& candidate : s.segments) {
    seg = &candidate;
    if (t < start + candidate.duration) {
      alpha = candidate.duration > 0.0 ? (t - start) / candidate.duration : 1.0;
      break;
    }
    start += candidate.duration;
    alpha = 1.0;
  }
  if (seg == nullptr) return out;
  out.op = lerp(seg->start, seg->end, std::clamp(alpha, 0.0, 1.0));
  out.injection_enabled = seg->injection_enabled;
  out.d = seg->d.value_or(s.injection.d);
  return out;
}

Simulator::Simulator(Scenario scenario)
    : scenario_(std::move(scenario)),
      state_(initial_state(scenario_.params)),
      carriers_(scenario_.params.n_sm, scenario_.params.f_carrier) {
  const auto gains = default_cc_gains(scenario_.params, scenario_.control);
  for (auto& c : ctrl_) c.gains = gains;
  if (!scenario_.control.cc_enabled)
    for (auto& c : ctrl_) c.gains = CcControllerGains{0.0, 0.0, gains.limit};
  d_active_ = scenario_.injection.d;
  history_.reserve(kHistoryLength);
  // Averaging window covers periods down to kMinBalanceFrequency.
  const auto capacity = static_cast<std::size_t>(std::ceil(1.0 / (kMinBalanceFrequency * scenario_.dt))) + 2;
  for (auto& b : balance_prefix_) b.assign(capacity, 0.0);
}

double Simulator::balance_average(int phase, double sample, double f_s) {
  auto& buf = balance_prefix_[phase];
  const std::size_t cap = buf.size();
  const std::size_t prev = (balance_head_ + cap - 1) % cap;
  buf[balance_head_] = buf[prev] + sample;
  const double f = std::max(f_s, kMinBalanceFrequency);
  std::size_t window = static_cast<std::size_t>(std::llround(1.0 / (f * scenario_.dt)));
  window = std::clamp<std::size_t>(window, 1, cap - 1);
  window = std::min<std::size_t>(window, static_cast<std::size_t>(steps_) + 1);
  const std::size_t back = (balance_head_ + cap - window) % cap;
  return (buf[balance_head_] - buf[back]) / static_cast<double>(window);
}

void Simulator::push_history() {
  StepSnapshot snap;
  snap.t = state_.t;
  for (int x = 0; x < 3; ++x) {
    snap.i_circ[x] = state_.legs[x].i_circ;
    const ArmState* arms[2] = {&state_.legs[x].upper, &state_.legs[x].lower};
    for (int a = 0; a < 2; ++a) {
      snap.v_arm_inserted[2 * x + a] = arms[a]->inserted_voltage();
      double vmin = arms[a]->sms.front().v_c;
      for (const auto& sm : arms[a]->sms) vmin = std::min(vmin, sm.v_c);
      snap.v_arm_min[2 * x + a] = vmin;
    }
  }
  if (history_.size() < kHistoryLength) {
    history_.push_back(snap);
  } else {
    history_[history_pos_] = snap;
  }
  history_pos_ = (history_pos_ + 1) % kHistoryLength;
}

void Simulator::step() {
  const auto& p = scenario_.params;
  const auto& ctl = scenario_.control;
  const double dt = scenario_.dt;
  const double t = state_.t;
  const ScheduledPoint sp = schedule_at(scenario_, t);

  // Injection on/off and slope changes take effect only at injection
  // zero crossings so the references stay continuous.
  if (at_zero_crossing_) {
    injection_active_ = sp.injection_enabled && scenario_.injection.technique != Technique::None;
    d_active_ = sp.d;
  }
  const Technique tech = injection_active_ ? scenario_.injection.technique : Technique::None;
  const OperatingPoint& op = sp.op;

  const double dtheta = kTwoPi * op.f_s * dt;
  const double dtheta_h = kTwoPi * scenario_.injection.f_h * dt;
  const bool full_resort = carriers_.period_index(t) != last_period_;
  last_period_ = carriers_.period_index(t);

  for (int x = 0; x < 3; ++x) {
    LegState& leg = state_.legs[x];
    const double theta_x = state_.theta + kPhaseOffset[x];
    const LegReference ref = leg_reference(scenario_, op, tech, d_active_, theta_x, state_.theta_h);
    const LegReference next =
        leg_reference(scenario_, op, tech, d_active_, theta_x + dtheta, state_.theta_h + dtheta_h);
    ref_saturations_ += static_cast<std::uint64_t>(ref.saturations);
    if (ref.headroom_exhausted) ++headroom_steps_;

    const double i_u_now = leg.i_circ + 0.5 * ref.i_xs;
    const double i_l_now = leg.i_circ - 0.5 * ref.i_xs;

    // Slow leg-energy correction: DC offset on the circulating current.
    const ArmStats su = arm_stats(leg.upper);
    const ArmStats sl = arm_stats(leg.lower);
    const double n_leg = 2.0 * p.n_sm;
    const double v_rms_leg = std::sqrt((su.sum_sq + sl.sum_sq) / n_leg);
    double i_energy = ctl.energy_gain * (p.v_c_init - v_rms_leg);
    if (ctl.loss_feedforward) i_energy += p.r_arm * (i_u_now * i_u_now + i_l_now * i_l_now) / p.v_dc;
    // Upper/lower balancing. Since p_u - p_l = -2 (v_xs + v_xh) i_b, a CC
    // component in phase with sin(theta_x) and with the injected CC unit
    // shape moves energy between the arms. The fundamental part is not
    // scaled by m_a so it keeps its authority at low speed.
    const double n_arm = static_cast<double>(p.n_sm);
    const double imbalance =
        balance_average(x, std::sqrt(su.sum_sq / n_arm) - std::sqrt(sl.sum_sq / n_arm), op.f_s);
    i_energy += imbalance * (ctl.balance_gain * std::sin(theta_x) +
                             ctl.balance_gain_hf * ref.v_h_peak * ref.u_cc / (0.5 * p.v_dc));

    const double i_ref = ref.i_circ + i_energy;
    double v_corr = cc_controller_update(ctrl_[x], i_ref, leg.i_circ, dt);
    // The injected component sits above the PI bandwidth, so its inductor
    // and resistor voltages are fed forward; the baseline is left to the PI.
    if (ctl.cc_feedforward && ctl.cc_enabled) {
      v_corr += 2.0 * p.l_arm * (next.i_xh - ref.i_xh) / dt + 2.0 * p.r_arm * next.i_xh;
      v_corr = std::clamp(v_corr, -ctrl_[x].gains.limit, ctrl_[x].gains.limit);
    }

    double v_u_cmd = ref.v_upper - 0.5 * v_corr;
    double v_l_cmd = ref.v_lower - 0.5 * v_corr;
    const double avail_u = su.sum;
    const double avail_l = sl.sum;
    // An arm that cannot produce its command hands the excess to the other
    // arm: the leg sum (and so the circulating current) keeps priority over
    // the differential output voltage.
    for (int pass = 0; pass < 2; ++pass) {
      if (const double over = v_u_cmd - std::clamp(v_u_cmd, 0.0, avail_u); over != 0.0) {
        ++cmd_saturations_;
        v_u_cmd -= over;
        v_l_cmd += over;
      }
      if (const double over = v_l_cmd - std::clamp(v_l_cmd, 0.0, avail_l); over != 0.0) {
        ++cmd_saturations_;
        v_l_cmd -= over;
        v_u_cmd += over;
      }
    }
    v_u_cmd = std::clamp(v_u_cmd, 0.0, avail_u);
    v_l_cmd = std::clamp(v_l_cmd, 0.0, avail_l);

    const int n_u = pwm_insertion_count(v_u_cmd / avail_u, carriers_, t);
    const int n_l = pwm_insertion_count(v_l_cmd / avail_l, carriers_, t);
    switching_ += static_cast<std::uint64_t>(balance_select(leg.upper, n_u, i_u_now, full_resort));
    switching_ += static_cast<std::uint64_t>(balance_select(leg.lower, n_l, i_l_now, full_resort));

    const double v_u = leg.upper.inserted_voltage();
    const double v_l = leg.lower.inserted_voltage();
    const double i_new =
        (leg.i_circ + dt / (2.0 * p.l_arm) * (p.v_dc - v_u - v_l)) / (1.0 + dt * p.r_arm / p.l_arm);
    leg.i_circ = i_new;

    const double i_u = i_new + 0.5 * ref.i_xs;
    const double i_l = i_new - 0.5 * ref.i_xs;
    const double dv_u = i_u * dt / p.c_sm;
    const double dv_l = i_l * dt / p.c_sm;
    for (auto& sm : leg.upper.sms)
      if (sm.inserted) sm.v_c += dv_u;
    for (auto& sm : leg.lower.sms)
      if (sm.inserted) sm.v_c += dv_l;

    trace_.i_arm[2 * x] = i_u;
    trace_.i_arm[2 * x + 1] = i_l;
    trace_.v_inserted[2 * x] = v_u;
    trace_.v_inserted[2 * x + 1] = v_l;
    trace_.i_s[x] = ref.i_xs;
    trace_.i_circ_ref[x] = i_ref;
    trace_.v_xh[x] = ref.v_xh;
    trace_.i_xh[x] = ref.i_xh;
    trace_.v_xs[x] = ref.v_xs;
    trace_.i_xd[x] = ref.i_xd;
  }

  // Phase accumulators.
  state_.theta = wrap_angle(state_.theta + dtheta);
  balance_head_ = (balance_head_ + 1) % balance_prefix_[0].size();
  const double before = state_.theta_h;
  double after = before + dtheta_h;
  at_zero_crossing_ = (before < kPi && after >= kPi) || after >= kTwoPi;
  state_.theta_h = wrap_angle(after);
  ++steps_;
  state_.t = static_cast<double>(steps_) * dt;

  push_history();
  for (int x = 0; x < 3; ++x) {
    bool ok = std::isfinite(state_.legs[x].i_circ);
    for (const ArmState* arm : {&state_.legs[x].upper, &state_.legs[x].lower})
      for (const auto& sm : arm->sms) ok = ok && std::isfinite(sm.v_c) && sm.v_c > 0.0;
    if (!ok) {
      std::ostringstream os;
      os << "simulation diverged at t = " << state_.t << " s in phase " << "abc"[x]
         << " (non-finite current or non-positive capacitor voltage); last " << history_.size()
         << " steps retained";
      std::vector<StepSnapshot> ordered;
      ordered.reserve(history_.size());
      for (std::size_t i = 0; i < history_.size(); ++i)
        ordered.push_back(history_[(history_pos_ + i) % history_.size()]);
      throw SimulationError(os.str(), std::move(ordered));
    }
  }
}

void Simulator::record_sample(RunRecord& rec) const {
  rec.t.push_back(state_.t);
  const ScheduledPoint sp = schedule_at(scenario_, state_.t);
  rec.f_s.push_back(sp.op.f_s);
  const Technique tech = injection_active_ ? scenario_.injection.technique : Technique::None;
  for (int x = 0; x < 3; ++x) {
    const LegState& leg = state_.legs[x];
    const LegReference ref =
        leg_reference(scenario_, sp.op, tech, d_active_, state_.theta + kPhaseOffset[x], state_.theta_h);
    auto& ph = rec.phases[x];
    ph.i_s.push_back(ref.i_xs);
    ph.i_circ.push_back(leg.i_circ);
    ph.i_u.push_back(leg.i_circ + 0.5 * ref.i_xs);
    ph.i_l.push_back(leg.i_circ - 0.5 * ref.i_xs);
    ph.i_h_ref.push_back(ref.i_xh);
    ph.i_h_realized.push_back(0.0);
    ph.v_h_ref.push_back(ref.v_xh);
    const ArmState* arms[2] = {&leg.upper, &leg.lower};
    RunRecord::ArmSeries* series[2] = {&ph.upper, &ph.lower};
    for (int a = 0; a < 2; ++a) {
      const ArmStats st = arm_stats(*arms[a]);
      series[a]->vc_min.push_back(st.min);
      series[a]->vc_mean.push_back(st.mean);
      series[a]->vc_max.push_back(st.max);
      series[a]->n_insert.push_back(arms[a]->n_insert);
      for (const auto& sm : arms[a]->sms) rec.sm_voltages.push_back(static_cast<float>(sm.v_c));
    }
  }
}

RunRecord Simulator::run() {
  RunRecord rec;
  rec.n_sm = scenario_.params.n_sm;
  rec.f_h = scenario_.injection.f_h;
  rec.sample_dt = scenario_.dt * scenario_.record_decimation;
  const double total = scenario_.duration();
  if (!(total > 0.0)) return rec;
  const auto n_steps = static_cast<std::int64_t>(std::llround(total / scenario_.dt));
  const auto n_samples = static_cast<std::size_t>(n_steps / scenario_.record_decimation + 1);
  rec.t.reserve(n_samples);
  rec.sm_voltages.reserve(n_samples * 6 * static_cast<std::size_t>(rec.n_sm));
  for (std::int64_t i = 0; i < n_steps; ++i) {
    // Samples hold the state entering the step; insertion counts are the
    // ones chosen on the previous step.
    if (i % scenario_.record_decimation == 0) record_sample(rec);
    step();
  }
  rec.reference_saturations = ref_saturations_;
  rec.command_saturations = cmd_saturations_;
  rec.headroom_exhausted_steps = headroom_steps_;
  rec.switching_events = switching_;
  rec.compute_realized_injection();
  return rec;
}

RunRecord run_scenario(const Scenario& scenario) {
  Simulator sim(scenario);
  return sim.run();
}

}  // namespace mmc
