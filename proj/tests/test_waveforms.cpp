#include <doctest.h>

#include <cmath>
#include <random>

#include "mmc/waveforms.hpp"

using namespace mmc;

namespace {

constexpr double pi = 3.14159265358979323846;

// Reference trapezoid written from its geometric description: a unit-height
// plateau with linear edges of width d/4 period, odd over the half period.
double trapezoid_oracle(double theta, double d) {
  double u = std::fmod(theta / (2 * pi), 1.0);
  if (u < 0) u += 1.0;
  const double sgn = u < 0.5 ? 1.0 : -1.0;
  const double h = u < 0.5 ? u : u - 0.5;
  const double edge = d / 4.0;
  return sgn * std::min({1.0, h / edge, (0.5 - h) / edge});
}

double mean_product(double (*f)(double), double (*g)(double), int n = 1 << 18) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = 2 * pi * (i + 0.5) / n;
    acc += f(th) * g(th);
  }
  return acc / n;
}

}  // namespace

TEST_CASE("fundamental signals") {
  const OperatingPoint op{60, 0.8, 100, 0.3};
  CHECK(modulation_signal(op, 7000, pi / 2) == doctest::Approx(0.8 * 3500));
  CHECK(output_current(op, 0.3) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(output_current(op, 0.3 + pi / 2) == doctest::Approx(100));
  CHECK(baseline_circulating_current(2000, 50, 7000) == doctest::Approx(2000.0 * 50 / 7000));
}

TEST_CASE("kc taper") {
  CHECK(kc_taper(0.162, 0.4, 0.9) == 1.0);
  CHECK(kc_taper(0.95, 0.4, 0.9) == 0.0);
  CHECK(kc_taper(0.65, 0.4, 0.9) == doctest::Approx(0.5));
  // continuity at both corners
  CHECK(kc_taper(0.4 + 1e-12, 0.4, 0.9) == doctest::Approx(1.0));
  CHECK(kc_taper(0.9 - 1e-12, 0.4, 0.9) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("scaling factors per technique") {
  CHECK(scaling_factor_k(Technique::SineSine, 0.3) == 2.0);
  CHECK(scaling_factor_k(Technique::SquareSine, 0.3) == doctest::Approx(pi / 2));
  CHECK(scaling_factor_k(Technique::SquareSquare, 0.3) == 1.0);
  CHECK(scaling_factor_k(Technique::SquareTrapezoid, 0.2) == doctest::Approx(1.0 / 0.9));
  CHECK(scaling_factor_k(Technique::None, 0.2) == 0.0);
}

TEST_CASE("trapezoid matches the geometric oracle on a dense grid") {
  for (double d : {0.04, 0.2, 0.5, 1.0}) {
    for (int i = -2000; i <= 22000; ++i) {
      const double th = 2 * pi * i / 20000.0 + 1e-7;
      REQUIRE(trapezoid_unit(th, d) == doctest::Approx(trapezoid_oracle(th, d)).epsilon(1e-9));
    }
  }
}

TEST_CASE("trapezoid approaches the square wave off the ramps as d shrinks") {
  const double d = 1e-4;
  for (int i = 0; i < 1000; ++i) {
    const double th = 2 * pi * (i + 0.5) / 1000.0;
    CHECK(trapezoid_unit(th, d) == square_unit(th));
  }
}

TEST_CASE("unit shapes and the technique selectors") {
  CHECK(square_unit(0.1) == 1.0);
  CHECK(square_unit(pi + 0.1) == -1.0);
  CHECK(square_unit(-0.1) == -1.0);
  CHECK(sine_unit(pi / 2) == doctest::Approx(1.0));
  CHECK(cmv_unit(Technique::SineSine, pi / 2) == doctest::Approx(1.0));
  CHECK(cmv_unit(Technique::SquareSine, 0.2) == 1.0);
  CHECK(cmv_unit(Technique::None, 0.2) == 0.0);
  CHECK(cc_unit(Technique::SquareSine, pi / 6, 0.2) == doctest::Approx(0.5));
  CHECK(cc_unit(Technique::SquareSquare, 4.0, 0.2) == -1.0);
  CHECK(cc_unit(Technique::SquareTrapezoid, pi / 2, 0.2) == 1.0);
  CHECK(cc_unit(Technique::None, 1.0, 0.2) == 0.0);
}

TEST_CASE("shape-pair products by quadrature") {
  CHECK(mean_product(sine_unit, sine_unit) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(mean_product(square_unit, sine_unit) == doctest::Approx(2 / pi).epsilon(1e-9));
  CHECK(mean_product(square_unit, square_unit) == doctest::Approx(1.0).epsilon(1e-9));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ud(0.04, 1.0);
  for (int r = 0; r < 10; ++r) {
    const double d = ud(rng);
    const int n = 1 << 18;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double th = 2 * pi * (i + 0.5) / n;
      acc += square_unit(th) * trapezoid_unit(th, d);
    }
    CHECK(acc / n == doctest::Approx(1 - 0.5 * d).epsilon(1e-9));
  }
}

TEST_CASE("injection envelope sizing") {
  ConverterParams p;
  InjectionConfig cfg;
  cfg.technique = Technique::SquareTrapezoid;
  cfg.kc_lo = 0.4;
  cfg.kc_hi = 0.9;
  const OperatingPoint op{9.96, 0.162, 100, 0.56};
  const double v = 400, i = 80, id = v * i / p.v_dc;
  const auto env = injection_envelope(op, v, i, id, cfg, 0.2, p);
  const double vh = 3500 * (1 - 0.162);
  CHECK(env.v_h == doctest::Approx(vh));
  CHECK(env.k_c == 1.0);
  CHECK(env.i_h == doctest::Approx((1 / 0.9) * std::abs(0.25 * 7000 * i - v * id) / vh));
  CHECK(env.sign == 1.0);
  CHECK_FALSE(env.headroom_exhausted);

  const auto neg = injection_envelope(op, v, -i, -id, cfg, 0.2, p);
  CHECK(neg.sign == -1.0);
  CHECK(neg.signed_i_h() == doctest::Approx(-neg.i_h));

  // Near rated modulation the taper removes the injection.
  const auto high = injection_envelope({60, 0.97, 100, 0.56}, v, i, id, cfg, 0.2, p);
  CHECK(high.k_c == 0.0);
  CHECK(high.i_h == 0.0);

  // Headroom below the floor disables injection altogether.
  cfg.headroom_floor = 0.2;
  const auto ex = injection_envelope({60, 0.7, 100, 0.56}, v, i, id, cfg, 0.2, p);
  CHECK(ex.headroom_exhausted);
  CHECK(ex.i_h == 0.0);
  CHECK(ex.v_h == 0.0);
}

TEST_CASE("arm references sum to the DC link before clamping") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  InjectionEnvelope env;
  for (int k = 0; k < 1000; ++k) {
    env.v_h = 1000 * std::abs(u(rng));
    env.i_h = 50 * std::abs(u(rng));
    env.sign = u(rng) < 0 ? -1.0 : 1.0;
    const double vs = 2000 * u(rng), is = 100 * u(rng), id = vs * is / 7000;
    const double cmv = u(rng), cc = u(rng);
    const auto r = arm_references(7000, vs, is, id, env, cmv, cc, 1e9);
    CHECK(r.v_upper + r.v_lower == doctest::Approx(7000.0).epsilon(1e-12));
    CHECK(r.i_upper - r.i_lower == doctest::Approx(is).epsilon(1e-12));
    CHECK(r.saturations == 0);
  }
  env.v_h = 3000;
  env.i_h = 0;
  const auto sat = arm_references(7000, 3000, 0, 0, env, 1.0, 0.0, 7000);
  CHECK(sat.v_upper == 0.0);
  CHECK(sat.v_lower == 7000.0);
  CHECK(sat.saturations == 2);
}

TEST_CASE("wrap_angle") {
  CHECK(wrap_angle(-0.5) == doctest::Approx(2 * pi - 0.5));
  CHECK(wrap_angle(7.0) == doctest::Approx(7.0 - 2 * pi));
  CHECK(wrap_angle(0.0) == 0.0);
}
