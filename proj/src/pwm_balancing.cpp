#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mmc/simulator.hpp"

namespace mmc {

PwmCarriers::PwmCarriers(int n_sm, double f_carrier) : n_sm_(n_sm), f_carrier_(f_carrier) {}

double PwmCarriers::carrier(int k, double t) const {
  const double phase = f_carrier_ * t + static_cast<double>(k) / n_sm_;
  const double frac = phase - std::floor(phase);
  return 1.0 - std::abs(2.0 * frac - 1.0);
}

std::int64_t PwmCarriers::period_index(double t) const {
  return static_cast<std::int64_t>(std::floor(f_carrier_ * t));
}

int pwm_insertion_count(double v_ref_normalized, const PwmCarriers& carriers, double t) {
  if (!(v_ref_normalized > 0.0)) return 0;
  if (v_ref_normalized >= 1.0) return carriers.n_sm();
  int count = 0;
  for (int k = 0; k < carriers.n_sm(); ++k)
    if (carriers.carrier(k, t) < v_ref_normalized) ++count;
  return count;
}

int balance_select(ArmState& arm, int n_insert, double i_arm, bool full_resort) {
  auto& sms = arm.sms;
  const int n = static_cast<int>(sms.size());
  n_insert = std::clamp(n_insert, 0, n);
  const bool charging = i_arm > 0.0;
  // "Preferred" order: the SMs that should be inserted first.
  auto preferred = [&](int a, int b) {
    const double va = sms[a].v_c, vb = sms[b].v_c;
    if (va != vb) return charging ? va < vb : va > vb;
    return a < b;
  };

  int changes = 0;
  auto set = [&](int idx, bool on) {
    if (sms[idx].inserted != on) {
      sms[idx].inserted = on;
      ++changes;
    }
  };

  if (full_resort) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), preferred);
    for (int i = 0; i < n; ++i) set(order[i], i < n_insert);
  } else {
    std::vector<int> on, off;
    for (int i = 0; i < n; ++i) (sms[i].inserted ? on : off).push_back(i);
    const int current = static_cast<int>(on.size());
    if (n_insert > current) {
      const int add = n_insert - current;
      std::partial_sort(off.begin(), off.begin() + add, off.end(), preferred);
      for (int i = 0; i < add; ++i) set(off[i], true);
    } else if (n_insert < current) {
      const int drop = current - n_insert;
      auto least_preferred = [&](int a, int b) { return preferred(b, a); };
      std::partial_sort(on.begin(), on.begin() + drop, on.end(), least_preferred);
      for (int i = 0; i < drop; ++i) set(on[i], false);
    }
  }
  arm.n_insert = n_insert;
  return changes;
}

}  // namespace mmc
