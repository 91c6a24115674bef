#include <doctest.h>

#include <algorithm>
#include <vector>

#include "mmc/simulator.hpp"

using namespace mmc;

namespace {

ArmState make_arm(std::vector<double> v) {
  ArmState a;
  for (double x : v) a.sms.push_back({x, false});
  return a;
}

int inserted_count(const ArmState& a) {
  return static_cast<int>(std::count_if(a.sms.begin(), a.sms.end(), [](const auto& s) { return s.inserted; }));
}

}  // namespace

TEST_CASE("carriers are unit triangles shifted by 1/N of a period") {
  PwmCarriers c(4, 500.0);
  CHECK(c.carrier(0, 0.0) == doctest::Approx(0.0));
  CHECK(c.carrier(0, 0.001) == doctest::Approx(1.0));  // half period
  CHECK(c.carrier(0, 0.0005) == doctest::Approx(0.5));
  CHECK(c.carrier(1, 0.0) == doctest::Approx(0.5));  // shifted a quarter period
  CHECK(c.carrier(2, 0.0) == doctest::Approx(1.0));
  CHECK(c.period_index(0.0021) == 1);
}

TEST_CASE("insertion count equals the average reference over a carrier period") {
  PwmCarriers c(20, 500.0);
  for (double ref : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    const int n = 2000;
    double avg = 0.0;
    for (int i = 0; i < n; ++i) avg += pwm_insertion_count(ref, c, (i + 0.5) * 0.002 / n);
    CHECK(avg / n == doctest::Approx(20 * ref).epsilon(1e-3));
  }
  CHECK(pwm_insertion_count(-0.2, c, 0.0) == 0);
  CHECK(pwm_insertion_count(1.2, c, 0.0) == 20);
}

TEST_CASE("full re-sort inserts the lowest SMs when charging") {
  ArmState a = make_arm({350, 340, 360, 330, 355});
  balance_select(a, 2, 10.0, true);
  CHECK(a.sms[3].inserted);
  CHECK(a.sms[1].inserted);
  CHECK(inserted_count(a) == 2);
  CHECK(a.n_insert == 2);
}

TEST_CASE("full re-sort inserts the highest SMs when discharging") {
  ArmState a = make_arm({350, 340, 360, 330, 355});
  balance_select(a, 2, -10.0, true);
  CHECK(a.sms[2].inserted);
  CHECK(a.sms[4].inserted);
}

TEST_CASE("ties are broken by index") {
  ArmState a = make_arm({350, 350, 350, 350});
  balance_select(a, 2, 5.0, true);
  CHECK(a.sms[0].inserted);
  CHECK(a.sms[1].inserted);
}

TEST_CASE("incremental mode only touches the difference") {
  ArmState a = make_arm({350, 340, 360, 330, 355});
  balance_select(a, 2, 10.0, true);  // inserts 3 and 1
  // Raise the count by one: the next-lowest SM (0) is added, nothing removed.
  CHECK(balance_select(a, 3, 10.0, false) == 1);
  CHECK(a.sms[0].inserted);
  CHECK(a.sms[1].inserted);
  CHECK(a.sms[3].inserted);
  // Lower by two while discharging: the least suitable (lowest) go first.
  CHECK(balance_select(a, 1, -10.0, false) == 2);
  CHECK(inserted_count(a) == 1);
  CHECK(a.sms[0].inserted);
  // Same count: no switching.
  CHECK(balance_select(a, 1, 10.0, false) == 0);
}
