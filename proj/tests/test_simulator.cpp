#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "mmc/simulator.hpp"
#include "mmc/waveforms.hpp"
#include "step_invariants.hpp"

using namespace mmc;

namespace {

Scenario constant(double speed, double duration, Technique tech = Technique::None) {
  Scenario s;
  s.name = "t";
  const auto op = vf_operating_point(s.params, speed, 0.4, kDefaultPhi);
  s.injection.technique = tech;
  s.segments = {{duration, op, op, tech != Technique::None, {}}};
  return s;
}

}  // namespace

TEST_CASE("default controller tuning") {
  ConverterParams p;
  ControlConfig c;
  const auto g = default_cc_gains(p, c);
  const double w = 2 * 3.14159265358979323846 * 50.0;
  CHECK(g.kp == doctest::Approx(2 * 1e-3 * w));
  CHECK(g.ki == doctest::Approx(g.kp * 0.1 / 1e-3));
  CHECK(g.limit == doctest::Approx(700.0));
}

TEST_CASE("PI update clamps integrator and output") {
  CcControllerState s;
  s.gains = {1.0, 1000.0, 10.0};
  CHECK(cc_controller_update(s, 2.0, 0.0, 1e-3) == doctest::Approx(4.0));  // kp e + ki e dt
  for (int i = 0; i < 100; ++i) cc_controller_update(s, 100.0, 0.0, 1e-3);
  CHECK(s.integrator <= 10.0);
  CHECK(cc_controller_update(s, 100.0, 0.0, 1e-3) == doctest::Approx(10.0));
  CHECK(cc_controller_update(s, -100.0, 0.0, 1e-3) == doctest::Approx(-10.0));
}

TEST_CASE("schedule interpolates ramps and holds the last point") {
  Scenario s = constant(1.0, 1.0);
  const auto low = vf_operating_point(s.params, 0.5, 0.4, kDefaultPhi);
  s.segments.push_back({1.0, s.segments[0].end, low, true, 0.3});
  const auto mid = schedule_at(s, 1.5);
  CHECK(mid.op.f_s == doctest::Approx(45.0));
  CHECK(mid.injection_enabled);
  CHECK(mid.d == doctest::Approx(0.3));
  CHECK(schedule_at(s, 0.5).op.f_s == doctest::Approx(60.0));
  CHECK(schedule_at(s, 5.0).op.f_s == doctest::Approx(30.0));
}

TEST_CASE("step-level invariants on a one-second rated run") {
  Scenario s = constant(1.0, 1.0);
  validate_scenario(s);
  const auto r = testing::check_step_invariants(s);
  CHECK(r.kirchhoff_max <= 1e-12 * 250);
  CHECK(r.charge_rel_max < 1e-6);
  CHECK(std::abs(r.energy_residual) < 0.01 * std::abs(r.energy_in));
  CHECK(std::abs(r.energy_residual) < 0.01 * std::abs(r.energy_out));
  CHECK(r.energy_in > 0.0);
}

TEST_CASE("identical scenarios give bit-identical records") {
  Scenario s = constant(0.5, 0.2, Technique::SquareTrapezoid);
  validate_scenario(s);
  const RunRecord a = run_scenario(s);
  const RunRecord b = run_scenario(s);
  REQUIRE(a.size() == b.size());
  CHECK(a.t == b.t);
  CHECK(a.sm_voltages == b.sm_voltages);
  for (int x = 0; x < 3; ++x) {
    CHECK(a.phases[x].i_circ == b.phases[x].i_circ);
    CHECK(a.phases[x].i_h_realized == b.phases[x].i_h_realized);
    CHECK(a.phases[x].upper.n_insert == b.phases[x].upper.n_insert);
  }
  CHECK(a.switching_events == b.switching_events);
}

TEST_CASE("record layout and decimation") {
  Scenario s = constant(1.0, 0.05);
  s.record_decimation = 10;
  const RunRecord r = run_scenario(s);
  CHECK(r.size() == 1000);
  CHECK(r.sample_dt == doctest::Approx(5e-5));
  CHECK(r.sm_voltages.size() == r.size() * 6 * 20);
  CHECK(r.n_sm == 20);
  CHECK(r.phases[0].upper.vc_min[0] <= r.phases[0].upper.vc_mean[0]);
  CHECK(r.phases[0].upper.vc_mean[0] <= r.phases[0].upper.vc_max[0]);
}

TEST_CASE("zero-duration scenario yields an empty record") {
  Scenario s = constant(1.0, 0.0);
  CHECK(run_scenario(s).size() == 0);
}

TEST_CASE("injection switches on only at a zero crossing of the injection phase") {
  Scenario s = constant(0.166, 0.05, Technique::SquareTrapezoid);
  s.segments.insert(s.segments.begin(), {0.0123, s.segments[0].start, s.segments[0].start, false, {}});
  validate_scenario(s);
  Simulator sim(s);
  bool was_active = false;
  while (sim.state().t < 0.04) {
    const double th = sim.state().theta_h;
    sim.step();
    if (sim.injection_active() && !was_active) {
      CHECK(sim.state().t > 0.0123);
      // Enabled at theta_h = 0 or pi.
      const double off = std::min({std::abs(th), std::abs(th - 3.14159265358979323846), std::abs(th - 6.283185307179586)});
      CHECK(off < 2 * 3.14159265358979323846 * 100 * s.dt + 1e-12);
    }
    was_active = sim.injection_active();
  }
  CHECK(was_active);
}

TEST_CASE("injection removes most of the fundamental SM power at low speed") {
  // Per-SM upper-arm power at f_s, with and without injection; the trace
  // gives the realized arm voltage and current of every step.
  auto fundamental = [](Technique tech) {
    Scenario s = constant(0.166, 1.6, tech);
    validate_scenario(s);
    Simulator sim(s);
    const double f = s.segments[0].start.f_s;
    const long steps = std::lround(s.duration() / s.dt);
    const long settle = steps - std::lround(6.0 / f / s.dt);
    std::complex<double> acc = 0.0;
    for (long k = 0; k < steps; ++k) {
      sim.step();
      if (k < settle) continue;
      const auto& tr = sim.last_step();
      const double p = tr.v_inserted[0] * tr.i_arm[0] / s.params.n_sm;
      acc += p * std::polar(1.0, -2 * 3.14159265358979323846 * f * (k * s.dt));
    }
    return std::abs(acc);
  };
  const double without = fundamental(Technique::None);
  const double with = fundamental(Technique::SquareTrapezoid);
  CHECK(with <= 0.2 * without);
}

TEST_CASE("metrics window checks") {
  Scenario s = constant(1.0, 0.2);
  const RunRecord r = run_scenario(s);
  CHECK_THROWS_AS(extract_metrics(r, 0.15, 0.2), MetricsError);  // 3 periods
  CHECK_THROWS_AS(extract_metrics(r, 0.1, 0.05), MetricsError);
  CHECK_THROWS_AS(extract_metrics(r, 0.0, 0.5), MetricsError);
  const auto m = extract_metrics(r, 0.1, 0.2);
  CHECK(m.line_i_peak == doctest::Approx(100.0).epsilon(1e-3));
  CHECK(m.cvr_pp > 0.0);
  CHECK(m.arm_i_rms <= m.arm_i_peak);
  CHECK(cvr_pp_in_window(r, 0.15, 0.16) > 0.0);
}

TEST_CASE("divergence raises a simulation error with a history") {
  Scenario s = constant(1.0, 0.2);
  s.params.c_sm = 1e-7;
  try {
    run_scenario(s);
    FAIL("expected divergence");
  } catch (const SimulationError& e) {
    CHECK(!e.history().empty());
    CHECK(e.history().size() <= 100);
    CHECK(std::string(e.what()).find("diverged") != std::string::npos);
  }
}
