#include "mmc/ripple_analysis.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "mmc/waveforms.hpp"

namespace mmc {

namespace {

constexpr int kGridPoints = 10000;
constexpr double kGolden = 0.6180339887498949;

// Golden-section search for a maximum of f on [a, b].
template <typename F>
double golden_max(F&& f, double a, double b, double tol) {
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

#ifndef NDEBUG
double quadrature_hf_power(double v_h, double i_h, Technique pair, double d) {
  constexpr int n = 1 << 16;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = kTwoPi * (i + 0.5) / n;
    acc += cmv_unit(pair, th) * cc_unit(pair, th, d);
  }
  return v_h * i_h * acc / n;
}
#endif

}  // namespace

double ripple_function_e(double t, double f_s, double f_sr, double phi) {
  const double fs2 = f_s * f_s;
  const double fr2 = f_sr * f_sr;
  const double w = kTwoPi * f_s * t;
  return (fs2 - 2.0 * fr2) / (4.0 * kPi * fr2) * std::cos(w - phi) + fs2 / (8.0 * kPi * fr2) * std::cos(w + phi) +
         fs2 / (24.0 * kPi * fr2) * std::cos(3.0 * w - phi);
}

RippleExtrema e_extrema(double f_s, double f_sr, double phi, double t_start) {
  if (!(f_s > 0.0)) throw DcOperationError();
  const double period = 1.0 / f_s;
  const double h = period / kGridPoints;
  // Work in the local coordinate tau in [0, period); the function is periodic
  // so the window start only shifts where the search begins.
  auto e = [&](double tau) { return ripple_function_e(t_start + tau, f_s, f_sr, phi); };
  int i_max = 0, i_min = 0;
  double v_max = e(0.0), v_min = v_max;
  for (int i = 1; i < kGridPoints; ++i) {
    const double v = e(i * h);
    if (v > v_max) v_max = v, i_max = i;
    if (v < v_min) v_min = v, i_min = i;
  }
  const double tol = 1e-10;
  const double tau_max = golden_max(e, (i_max - 1) * h, (i_max + 1) * h, tol);
  const double tau_min = golden_max([&](double tau) { return -e(tau); }, (i_min - 1) * h, (i_min + 1) * h, tol);

  RippleExtrema r;
  r.e_max = std::max(v_max, e(tau_max));
  r.e_min = std::min(v_min, e(tau_min));
  auto reduce = [period](double t) {
    double m = std::fmod(t, period);
    return m < 0.0 ? m + period : m;
  };
  r.t_max = reduce(t_start + tau_max);
  r.t_min = reduce(t_start + tau_min);
  return r;
}

EnergyFluctuation delta_energy(const ConverterParams& params, const OperatingPoint& op, const RippleExtrema& extrema) {
  if (!(op.f_s > 0.0)) throw DcOperationError();
  EnergyFluctuation out;
  out.delta_e = params.v_dc * op.i_peak * extrema.range() / (4.0 * params.n_sm * op.f_s);
  out.e_sm = 0.5 * params.c_sm * params.v_c_init * params.v_c_init;
  out.e_arm = out.e_sm * params.n_sm;
  return out;
}

double predicted_cvr(const ConverterParams& params, const OperatingPoint& op, const RippleExtrema& extrema) {
  if (!(op.f_s > 0.0)) throw DcOperationError();
  if (!(params.c_sm > 0.0)) throw std::invalid_argument("c_sm must be > 0");
  const double dv = op.i_peak * extrema.range() / (8.0 * params.c_sm * op.f_s);
  // Equating the energy-deviation form with the capacitor energy swing
  // 2 C V_c dv only closes when the arm voltage equals V_dc.
  if (params.v_dc == params.n_sm * params.v_c_init) {
    const double via_energy = delta_energy(params, op, extrema).delta_e / (2.0 * params.c_sm * params.v_c_init);
    if (std::abs(via_energy - dv) > 1e-12 * std::max(std::abs(dv), 1e-300))
      throw std::logic_error("ripple model inconsistency between energy and voltage forms");
  }
  return dv;
}

double predicted_cvr(const ConverterParams& params, const OperatingPoint& op) {
  if (!(op.f_s > 0.0)) throw DcOperationError();
  return predicted_cvr(params, op, e_extrema(op.f_s, params.f_rated, op.phi));
}

std::vector<CvrSweepRow> cvr_frequency_sweep(const ConverterParams& params, double i_peak, double phi,
                                             std::span<const double> f_list) {
  std::vector<CvrSweepRow> rows;
  rows.reserve(f_list.size());
  for (double f : f_list) {
    if (!(f > 0.0)) throw std::invalid_argument("cvr_frequency_sweep: frequencies must be > 0");
    const OperatingPoint op{f, params.rated_modulation_index() * std::min(1.0, f / params.f_rated), i_peak, phi};
    const double dv = predicted_cvr(params, op);
    rows.push_back({f, dv, 100.0 * dv / params.v_c_init});
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].f_s > rows[i - 1].f_s && !(rows[i].dv < rows[i - 1].dv))
      throw std::logic_error("cvr_frequency_sweep: ripple not decreasing with frequency");
  }
  return rows;
}

SmPowerTerms sm_power_terms(const ConverterParams& params, std::span<const PowerSample> samples) {
  SmPowerTerms out;
  out.term1.reserve(samples.size());
  out.term2.reserve(samples.size());
  out.term3.reserve(samples.size());
  const double n = params.n_sm;
  const double vdc = params.v_dc;
  for (const auto& s : samples) {
    out.term1.push_back((0.5 * vdc * s.i_xd - 0.5 * s.v_xs * s.i_xs) / n);
    out.term2.push_back((0.25 * vdc * s.i_xs - s.v_xs * s.i_xd - s.v_xh * s.i_xh) / n);
    out.term3.push_back((0.5 * vdc * s.i_xh - s.v_xs * s.i_xh - s.v_xh * s.i_xd - 0.5 * s.v_xh * s.i_xs) / n);
  }
  return out;
}

double avg_hf_power(double v_h, double i_h, Technique shape_pair, double d) {
  double p = 0.0;
  switch (shape_pair) {
    case Technique::None: p = 0.0; break;
    case Technique::SineSine: p = 0.5 * v_h * i_h; break;
    case Technique::SquareSine: p = 2.0 * v_h * i_h / kPi; break;
    case Technique::SquareSquare: p = v_h * i_h; break;
    case Technique::SquareTrapezoid: p = v_h * i_h * (1.0 - 0.5 * d); break;
  }
#ifndef NDEBUG
  const double q = quadrature_hf_power(v_h, i_h, shape_pair, d);
  assert(std::abs(q - p) <= 1e-6 * std::max(1.0, std::abs(p)));
#endif
  return p;
}

std::vector<KdRow> k_d_sweep(std::span<const double> d_list, double d_min) {
  std::vector<KdRow> rows;
  rows.reserve(d_list.size());
  for (double d : d_list) {
    if (!(d >= d_min && d <= 1.0)) throw std::invalid_argument("k_d_sweep: d outside [d_min, 1]");
    const double k = scaling_factor_k(Technique::SquareTrapezoid, d);
    rows.push_back({d, k, (2.0 - k) / 2.0});
  }
  return rows;
}

}  // namespace mmc
