#include <doctest.h>

#include <cmath>
#include <cstring>

#include "mmc/core_model.hpp"

using namespace mmc;

namespace {

Scenario rated_scenario() {
  Scenario s;
  s.name = "t";
  const auto op = rated_operating_point(s.params, 0.4);
  s.segments = {{0.1, op, op, false, {}}};
  return s;
}

bool mentions(const ValidationError& e, const std::string& needle) {
  for (const auto& v : e.violations())
    if (v.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("rated operating point follows the motor ratings") {
  ConverterParams p;
  const auto op = rated_operating_point(p, 0.4);
  CHECK(op.i_peak == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(op.f_s == 60.0);
  // 4160 V line rms -> phase peak over half the DC link.
  const double m = 4160.0 * std::sqrt(2.0 / 3.0) / 3500.0;
  CHECK(op.m_a == doctest::Approx(m).epsilon(1e-12));
  CHECK_THROWS_AS(rated_operating_point(p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rated_operating_point(p, 1.5), std::invalid_argument);
}

TEST_CASE("V/f scaling keeps current and scales frequency and modulation") {
  const OperatingPoint op{60.0, 0.97, 100.0, 0.5};
  for (double alpha : {0.0, 0.166, 0.5, 1.0, 1.3}) {
    const auto s = vf_scale(op, alpha);
    CHECK(s.f_s == doctest::Approx(60.0 * alpha));
    CHECK(s.m_a == doctest::Approx(std::min(1.0, 0.97 * alpha)));
    CHECK(s.i_peak == 100.0);
    CHECK(s.phi == 0.5);
  }
  ConverterParams p;
  const auto low = vf_operating_point(p, 0.166, 0.4, kDefaultPhi);
  CHECK(low.f_s == doctest::Approx(9.96));
  CHECK(low.i_peak == doctest::Approx(100.0));
}

TEST_CASE("lerp hits both endpoints") {
  const OperatingPoint a{60, 0.9, 100, 0.5}, b{10, 0.15, 50, 0.2};
  const auto m0 = lerp(a, b, 0.0), m1 = lerp(a, b, 1.0), mh = lerp(a, b, 0.5);
  CHECK(m0.f_s == 60);
  CHECK(m1.m_a == doctest::Approx(0.15));
  CHECK(mh.i_peak == doctest::Approx(75));
}

TEST_CASE("initial state: all SMs at nominal voltage, no current") {
  ConverterParams p;
  const auto st = initial_state(p);
  for (const auto& leg : st.legs) {
    CHECK(leg.i_circ == 0.0);
    CHECK(leg.upper.sms.size() == 20);
    CHECK(leg.upper.total_voltage() == doctest::Approx(7000.0));
    CHECK(leg.lower.inserted_voltage() == 0.0);
  }
  CHECK(st.i_dc() == 0.0);
}

TEST_CASE("technique names round-trip") {
  for (auto t : {Technique::None, Technique::SineSine, Technique::SquareSine, Technique::SquareSquare,
                 Technique::SquareTrapezoid})
    CHECK(technique_from_string(to_string(t)) == t);
  CHECK_THROWS_AS(technique_from_string("triangle"), std::invalid_argument);
}

TEST_CASE("validate_scenario accepts a valid scenario and is idempotent") {
  const Scenario s = rated_scenario();
  const Scenario& once = validate_scenario(s);
  const Scenario copy = once;
  const Scenario& twice = validate_scenario(copy);
  CHECK(&once == &s);
  CHECK(twice.segments.size() == s.segments.size());
  CHECK(std::memcmp(&twice.params, &s.params, sizeof(ConverterParams)) == 0);
  CHECK(twice.dt == s.dt);
}

TEST_CASE("validate_scenario reports every violation with its field path") {
  Scenario s = rated_scenario();
  s.params.c_sm = -1.0;
  s.injection.d = 1.5;
  s.injection.technique = Technique::SquareTrapezoid;
  s.dt = 1e-3;
  s.segments[0].duration = -1.0;
  try {
    validate_scenario(s);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(mentions(e, "params.c_sm"));
    CHECK(mentions(e, "injection.d"));
    CHECK(mentions(e, "dt"));
    CHECK(mentions(e, "segments[0].duration"));
    CHECK(e.violations().size() >= 4);
  }
}

TEST_CASE("arm must be able to block the DC link") {
  Scenario s = rated_scenario();
  s.params.v_c_init = 300.0;  // 20 * 300 < 7000
  CHECK_THROWS_AS(validate_scenario(s), ValidationError);
}

TEST_CASE("injection frequency must exceed the fundamental") {
  Scenario s = rated_scenario();
  s.injection.f_h = 50.0;
  s.segments[0].injection_enabled = true;
  s.injection.technique = Technique::SquareSine;
  CHECK_THROWS_AS(validate_scenario(s), ValidationError);
}

TEST_CASE("scenario duration sums segments") {
  Scenario s = rated_scenario();
  s.segments.push_back(s.segments[0]);
  s.segments[1].duration = 0.25;
  CHECK(s.duration() == doctest::Approx(0.35));
}
