#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mmc/ripple_analysis.hpp"
#include "mmc/waveforms.hpp"

using namespace mmc;

namespace {

constexpr double pi = 3.14159265358979323846;

// Arm-energy shape of the per-phase model, evaluated directly from its three
// cosine terms.
double e_oracle(double wt, double ratio, double phi) {
  const double r2 = ratio * ratio;
  return (r2 - 2) / (4 * pi) * std::cos(wt - phi) + r2 / (8 * pi) * std::cos(wt + phi) +
         r2 / (24 * pi) * std::cos(3 * wt - phi);
}

double e_range_grid(double ratio, double phi, int n = 2000000) {
  double hi = -1e300, lo = 1e300;
  for (int i = 0; i < n; ++i) {
    const double v = e_oracle(2 * pi * i / n, ratio, phi);
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  return hi - lo;
}

}  // namespace

TEST_CASE("ripple function agrees with the oracle") {
  for (double f : {6.0, 9.96, 30.0, 60.0})
    for (double t : {0.0, 0.0031, 0.017})
      CHECK(ripple_function_e(t, f, 60.0, 0.4) == doctest::Approx(e_oracle(2 * pi * f * t, f / 60.0, 0.4)));
}

TEST_CASE("extrema at rated frequency and unity power factor") {
  const auto r = e_extrema(60.0, 60.0, 0.0);
  CHECK(r.range() == doctest::Approx(std::sqrt(2.0) / (6 * pi)).epsilon(1e-6));
  CHECK(r.range() == doctest::Approx(e_range_grid(1.0, 0.0)).epsilon(1e-6));
  CHECK(r.t_max >= 0.0);
  CHECK(r.t_max < 1.0 / 60.0);
}

TEST_CASE("extrema match a dense grid for other operating points") {
  for (double f : {6.0, 20.0, 45.0})
    for (double phi : {0.0, 0.3, 0.9}) {
      const auto r = e_extrema(f, 60.0, phi);
      CHECK(r.range() == doctest::Approx(e_range_grid(f / 60.0, phi)).epsilon(1e-6));
    }
}

TEST_CASE("extrema are invariant to whole-period shifts of the search window") {
  const double f = 23.0;
  const auto a = e_extrema(f, 60.0, 0.5);
  for (int k : {1, 3, 17}) {
    const auto b = e_extrema(f, 60.0, 0.5, k / f);
    CHECK(b.e_max == doctest::Approx(a.e_max).epsilon(1e-12));
    CHECK(b.e_min == doctest::Approx(a.e_min).epsilon(1e-12));
  }
  CHECK_THROWS_AS(e_extrema(0.0, 60.0, 0.0), DcOperationError);
}

TEST_CASE("predicted ripple is homogeneous in current and capacitance") {
  ConverterParams p;
  const OperatingPoint op{12.0, 0.2, 100.0, 0.5};
  const double base = predicted_cvr(p, op);
  OperatingPoint op3 = op;
  op3.i_peak = 300.0;
  CHECK(predicted_cvr(p, op3) == doctest::Approx(3 * base).epsilon(1e-12));
  ConverterParams p2 = p;
  p2.c_sm = 2 * p.c_sm;
  CHECK(predicted_cvr(p2, op) == doctest::Approx(base / 2).epsilon(1e-12));
  // closed form against the grid oracle
  CHECK(base == doctest::Approx(100.0 * e_range_grid(0.2, 0.5) / (8 * p.c_sm * 12.0)).epsilon(1e-6));
  CHECK_THROWS_AS(predicted_cvr(p, {0.0, 0.0, 100.0, 0.0}), DcOperationError);
}

TEST_CASE("energy and voltage forms agree when the arm voltage equals the link") {
  ConverterParams p;
  const OperatingPoint op{30.0, 0.5, 100.0, 0.5};
  const auto ex = e_extrema(op.f_s, p.f_rated, op.phi);
  const auto de = delta_energy(p, op, ex);
  CHECK(de.delta_e / (2 * p.c_sm * p.v_c_init) == doctest::Approx(predicted_cvr(p, op, ex)).epsilon(1e-12));
  CHECK(de.e_sm == doctest::Approx(0.5 * 8e-3 * 350 * 350));
  CHECK(de.e_arm == doctest::Approx(20 * de.e_sm));
  CHECK(half_to_peak_to_peak(2.5) == 5.0);
}

TEST_CASE("frequency sweep decreases and validates input") {
  ConverterParams p;
  const std::vector<double> f{6, 10, 20, 40, 60};
  const auto rows = cvr_frequency_sweep(p, 100.0, 0.56, f);
  REQUIRE(rows.size() == f.size());
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].dv < rows[i - 1].dv);
  CHECK(rows[0].percent_vc == doctest::Approx(100 * rows[0].dv / 350));
  const std::vector<double> single{60};
  CHECK(cvr_frequency_sweep(p, 100.0, 0.56, single).size() == 1);
  const std::vector<double> bad{10, 0};
  CHECK_THROWS_AS(cvr_frequency_sweep(p, 100.0, 0.56, bad), std::invalid_argument);
}

TEST_CASE("per-SM power terms regroup the arm power") {
  ConverterParams p;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<PowerSample> s(200);
  for (auto& x : s) x = {2000 * u(rng), 100 * u(rng), 20 * u(rng), 1500 * u(rng), 60 * u(rng)};
  const auto terms = sm_power_terms(p, s);
  REQUIRE(terms.term1.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& x = s[i];
    const double v_u = p.v_dc / 2 - x.v_xs - x.v_xh;
    const double i_u = x.i_xs / 2 + x.i_xd + x.i_xh;
    const double direct = v_u * i_u;
    const double sum = p.n_sm * (terms.term1[i] + terms.term2[i] + terms.term3[i]);
    CHECK(sum == doctest::Approx(direct).epsilon(1e-9).scale(std::abs(v_u) * std::abs(i_u) + 1));
  }
}

TEST_CASE("average high-frequency power matches quadrature") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uv(100, 3000), ui(5, 80), ud(0.04, 1.0);
  for (int r = 0; r < 50; ++r) {
    const double vh = uv(rng), ih = ui(rng), d = ud(rng);
    for (auto t : {Technique::SineSine, Technique::SquareSine, Technique::SquareSquare, Technique::SquareTrapezoid}) {
      // The trapezoid corners fall off the grid, so it needs finer cells.
      const int n = t == Technique::SquareTrapezoid ? 1 << 21 : 1 << 16;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        const double th = 2 * pi * (i + 0.5) / n;
        const double cmv = t == Technique::SineSine ? std::sin(th) : (th < pi ? 1.0 : -1.0);
        double cc = 0.0;
        switch (t) {
          case Technique::SineSine:
          case Technique::SquareSine: cc = std::sin(th); break;
          case Technique::SquareSquare: cc = th < pi ? 1.0 : -1.0; break;
          default: cc = (th < pi ? 1.0 : -1.0) * std::min({1.0, std::fmod(th, pi) / (pi * d / 2), (pi - std::fmod(th, pi)) / (pi * d / 2)});
        }
        acc += cmv * cc;
      }
      CHECK(avg_hf_power(vh, ih, t, d) == doctest::Approx(vh * ih * acc / n).epsilon(1e-9));
    }
    CHECK(avg_hf_power(vh, ih, Technique::None, d) == 0.0);
  }
}

TEST_CASE("k(d) table") {
  const std::vector<double> ds{0.04, 0.2, 0.5, 1.0};
  const auto rows = k_d_sweep(ds);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].k == doctest::Approx(1.0 / 0.9).epsilon(1e-12));
  CHECK(rows[3].k == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rows[3].reduction == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rows[0].reduction == doctest::Approx((2 - 1 / 0.98) / 2));
  const std::vector<double> bad{0.01};
  CHECK_THROWS_AS(k_d_sweep(bad), std::invalid_argument);
}
