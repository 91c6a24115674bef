#pragma once

// Analytic capacitor-ripple model and high-frequency power balance.
//
// The closed-form ripple estimate is a trend model: it reproduces the 1/f_s
// dependence of the submodule ripple but underestimates absolute values seen
// in switched simulation. Use it for scaling studies, not absolute voltages.
//
// Ripple conventions: predicted_cvr returns the half-ripple dv (the
// capacitor swings V_c +/- dv). SummaryMetrics::cvr_pp is peak-to-peak;
// half_to_peak_to_peak converts.

#include <span>
#include <vector>

#include "mmc/core_model.hpp"

namespace mmc {

struct RippleExtrema {
  double e_max = 0.0;
  double e_min = 0.0;
  double t_max = 0.0;  // within [0, 1/f_s)
  double t_min = 0.0;

  double range() const { return e_max - e_min; }
};

struct EnergyFluctuation {
  double delta_e = 0.0;  // per-SM energy deviation [J]
  double e_arm = 0.0;    // nominal stored arm energy [J]
  double e_sm = 0.0;     // nominal stored SM energy [J]
};

/// Thrown for f_s = 0, where the model's energy deviation diverges.
class DcOperationError : public std::domain_error {
 public:
  DcOperationError() : std::domain_error("DC operation: energy deviation unbounded in this model") {}
};

/// Normalized arm-energy function: three cosines at f_s and 3 f_s with
/// coefficients depending on f_s / f_sr.
double ripple_function_e(double t, double f_s, double f_sr, double phi);

/// Extrema of ripple_function_e over one fundamental period starting at
/// t_start: 10^4-point grid followed by golden-section refinement.
RippleExtrema e_extrema(double f_s, double f_sr, double phi, double t_start = 0.0);

/// Per-SM energy deviation (V_dc I / (4 N f_s)) (e_max - e_min).
EnergyFluctuation delta_energy(const ConverterParams& params, const OperatingPoint& op, const RippleExtrema& extrema);

/// Half-ripple dv = I (e_max - e_min) / (8 C f_s). When V_dc = N V_c the
/// result is checked against delta_energy / (2 C V_c).
double predicted_cvr(const ConverterParams& params, const OperatingPoint& op);
double predicted_cvr(const ConverterParams& params, const OperatingPoint& op, const RippleExtrema& extrema);

inline double half_to_peak_to_peak(double dv) { return 2.0 * dv; }

struct CvrSweepRow {
  double f_s = 0.0;
  double dv = 0.0;         // half-ripple [V]
  double percent_vc = 0.0; // dv / V_c * 100
};

/// Predicted half-ripple over a list of frequencies. Throws
/// std::invalid_argument for f <= 0 and std::logic_error if dv fails to
/// decrease across strictly increasing frequencies.
std::vector<CvrSweepRow> cvr_frequency_sweep(const ConverterParams& params, double i_peak, double phi,
                                             std::span<const double> f_list);

/// Synchronized instantaneous quantities of one leg.
struct PowerSample {
  double v_xs = 0.0;
  double i_xs = 0.0;
  double i_xd = 0.0;
  double v_xh = 0.0;
  double i_xh = 0.0;
};

struct SmPowerTerms {
  std::vector<double> term1;  // (0.5 V_dc i_xd - 0.5 v_xs i_xs) / N
  std::vector<double> term2;  // (0.25 V_dc i_xs - v_xs i_xd - v_xh i_xh) / N
  std::vector<double> term3;  // (0.5 V_dc i_xh - v_xs i_xh - v_xh i_xd - 0.5 v_xh i_xs) / N
};

/// Upper-arm per-SM power split into the three groups above. Their sum
/// times N equals v_xu i_xu.
SmPowerTerms sm_power_terms(const ConverterParams& params, std::span<const PowerSample> samples);

/// Cycle-average power of a CMV/CC shape pair with peaks v_h and i_h.
/// Technique::None yields 0.
double avg_hf_power(double v_h, double i_h, Technique shape_pair, double d);

struct KdRow {
  double d = 0.0;
  double k = 0.0;
  double reduction = 0.0;  // CC peak reduction relative to sine/sine, (2 - k) / 2
};

/// k = 1/(1 - 0.5 d) and the peak reduction relative to sine/sine injection.
/// Throws std::invalid_argument for d outside [d_min, 1].
std::vector<KdRow> k_d_sweep(std::span<const double> d_list, double d_min = 0.04);

}  // namespace mmc
