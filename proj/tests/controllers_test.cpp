#include <doctest.h>

#include <algorithm>

#include "bess/controllers.hpp"
#include "support.hpp"

using namespace bess;

TEST_CASE("rule controller examples") {
  const auto spec = BatterySpec::full_range(710, 340);
  auto d = rule_dispatch(100, 150, {340}, spec, 0.25);
  CHECK(d.p_cha_kw == 0);
  CHECK(d.p_dis_kw == 0);

  d = rule_dispatch(100, 150, {170}, spec, 0.25);
  CHECK(d.p_cha_kw == doctest::Approx(50));
  CHECK(d.p_dis_kw == 0);

  d = rule_dispatch(500, 300, {10}, spec, 0.25);
  CHECK(d.p_cha_kw == 0);
  CHECK(d.p_dis_kw == doctest::Approx(40));
}

TEST_CASE("real-time controller examples") {
  const auto spec = BatterySpec::full_range(710, 340);
  auto r = realtime_decide(400, 300, {30, 0}, {170}, spec, 0.25);
  CHECK(r.applied == OverrideCase::forced_discharge);
  CHECK(r.dispatch.p_dis_kw == doctest::Approx(100));
  CHECK(r.dispatch.p_cha_kw == 0);

  r = realtime_decide(-80, 300, {0, 60}, {170}, spec, 0.25);
  CHECK(r.applied == OverrideCase::forced_charge);
  CHECK(r.dispatch.p_cha_kw == doctest::Approx(80));
  CHECK(r.dispatch.p_dis_kw == 0);

  r = realtime_decide(100, 300, {20, 0}, {170}, spec, 0.25);
  CHECK(r.applied == OverrideCase::none);
  CHECK(r.dispatch.p_cha_kw == 20);
  CHECK(r.dispatch.p_dis_kw == 0);

  // Full battery cannot take the surplus; guideline passes through capped.
  r = realtime_decide(-80, 300, {50, 0}, {340}, spec, 0.25);
  CHECK(r.applied == OverrideCase::none);
  CHECK(r.dispatch.p_cha_kw == 0);
}

TEST_CASE("property: both controllers stay inside power and SOC limits") {
  testing::Rng rng(12);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto spec = BatterySpec{rng.uniform(1, 800), 400, rng.uniform(0, 100), rng.uniform(150, 400)};
    const BatteryState s{rng.uniform(spec.soc_min_kwh, spec.soc_max_kwh)};
    const double net = rng.uniform(-600, 900);
    const double dct = rng.uniform(0, 500);
    const Dispatch guide = rng.coin() ? Dispatch{rng.uniform(0, 900), 0} : Dispatch{0, rng.uniform(0, 900)};

    for (const auto d : {rule_dispatch(net, dct, s, spec, 0.25),
                         realtime_dispatch(net, dct, guide, s, spec, 0.25)}) {
      CHECK(d.p_cha_kw >= 0);
      CHECK(d.p_dis_kw >= 0);
      CHECK(d.p_cha_kw <= spec.p_max_kw);
      CHECK(d.p_dis_kw <= spec.p_max_kw);
      CHECK(d.p_cha_kw * d.p_dis_kw == 0.0);
      const double after = s.soc_kwh + (d.p_cha_kw - d.p_dis_kw) * 0.25;
      CHECK(after >= spec.soc_min_kwh - 1e-9);
      CHECK(after <= spec.soc_max_kwh + 1e-9);
      CHECK_NOTHROW(apply_dispatch(std::max(net, 0.0), std::max(-net, 0.0), d, s, spec, 0.25));
    }
  }
}

TEST_CASE("property: a deficit override ignores the guideline") {
  testing::Rng rng(13);
  const auto spec = BatterySpec::full_range(300, 340);
  for (int trial = 0; trial < 500; ++trial) {
    const BatteryState s{rng.uniform(1, 340)};
    const double dct = rng.uniform(0, 300);
    const double net = dct + rng.uniform(0.1, 500);
    const Dispatch g1{rng.uniform(0, 300), 0};
    const Dispatch g2{0, rng.uniform(0, 300)};
    const auto a = realtime_decide(net, dct, g1, s, spec, 0.25);
    const auto b = realtime_decide(net, dct, g2, s, spec, 0.25);
    CHECK(a.applied == OverrideCase::forced_discharge);
    CHECK(a.dispatch.p_dis_kw == b.dispatch.p_dis_kw);
    const double expect = std::min({net - dct, spec.p_max_kw, s.soc_kwh / 0.25});
    CHECK(a.dispatch.p_dis_kw == doctest::Approx(expect));
  }
}
