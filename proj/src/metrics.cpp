#include <algorithm>
#include <cmath>
#include <limits>

#include "mmc/simulator.hpp"

namespace mmc {

void RunRecord::compute_realized_injection() {
  const std::size_t n = size();
  if (n == 0) return;
  std::size_t w = 1;
  if (f_h > 0.0 && sample_dt > 0.0) w = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / (f_h * sample_dt))));
  const std::size_t half = w / 2;
  std::vector<double> prefix(n + 1);
  for (auto& ph : phases) {
    prefix[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + ph.i_circ[i];
    ph.i_h_realized.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= half ? i - half : 0;
      const std::size_t hi = std::min(n, lo + w);
      const double mean = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
      ph.i_h_realized[i] = ph.i_circ[i] - mean;
    }
  }
}

namespace {

struct WindowRange {
  std::size_t lo, hi;  // [lo, hi)
};

WindowRange locate(const RunRecord& r, double t0, double t1) {
  if (r.size() == 0) throw MetricsError("empty record");
  if (!(t1 > t0)) throw MetricsError("metrics window must satisfy t1 > t0");
  const double slack = 1e-9 + r.sample_dt;
  if (t0 < r.t.front() - 1e-9 || t1 > r.t.back() + slack)
    throw MetricsError("metrics window outside the recorded time range");
  const auto lo = static_cast<std::size_t>(std::lower_bound(r.t.begin(), r.t.end(), t0 - 1e-12) - r.t.begin());
  const auto hi = static_cast<std::size_t>(std::upper_bound(r.t.begin(), r.t.end(), t1 + 1e-12) - r.t.begin());
  if (hi <= lo) throw MetricsError("metrics window contains no samples");
  return {lo, hi};
}

double cvr_over(const RunRecord& r, WindowRange w) {
  const std::size_t cells = static_cast<std::size_t>(6 * r.n_sm);
  std::vector<float> vmin(cells, std::numeric_limits<float>::max());
  std::vector<float> vmax(cells, std::numeric_limits<float>::lowest());
  for (std::size_t i = w.lo; i < w.hi; ++i) {
    const float* row = r.sm_voltages.data() + i * cells;
    for (std::size_t c = 0; c < cells; ++c) {
      vmin[c] = std::min(vmin[c], row[c]);
      vmax[c] = std::max(vmax[c], row[c]);
    }
  }
  double cvr = 0.0;
  for (std::size_t c = 0; c < cells; ++c) cvr = std::max(cvr, static_cast<double>(vmax[c]) - vmin[c]);
  return cvr;
}

}  // namespace

double cvr_pp_in_window(const RunRecord& record, double t0, double t1) {
  return cvr_over(record, locate(record, t0, t1));
}

SummaryMetrics extract_metrics(const RunRecord& r, double t0, double t1) {
  const WindowRange w = locate(r, t0, t1);
  double f_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = w.lo; i < w.hi; ++i) f_min = std::min(f_min, r.f_s[i]);
  if (!(f_min > 0.0) || (t1 - t0) < 5.0 / f_min - 1e-9)
    throw MetricsError("insufficient steady-state window: need at least 5 fundamental periods");

  SummaryMetrics m;
  m.t0 = t0;
  m.t1 = t1;
  m.cvr_pp = cvr_over(r, w);
  const double count = static_cast<double>(w.hi - w.lo);
  for (const auto& ph : r.phases) {
    double ss_u = 0.0, ss_l = 0.0;
    for (std::size_t i = w.lo; i < w.hi; ++i) {
      m.cc_peak = std::max(m.cc_peak, std::abs(ph.i_h_realized[i]));
      m.line_i_peak = std::max(m.line_i_peak, std::abs(ph.i_s[i]));
      m.arm_i_peak = std::max({m.arm_i_peak, std::abs(ph.i_u[i]), std::abs(ph.i_l[i])});
      ss_u += ph.i_u[i] * ph.i_u[i];
      ss_l += ph.i_l[i] * ph.i_l[i];
    }
    m.arm_i_rms = std::max({m.arm_i_rms, std::sqrt(ss_u / count), std::sqrt(ss_l / count)});
  }
  return m;
}

}  // namespace mmc
