#include <doctest.h>

#include <cmath>
#include <vector>

#include "bess/dct_planner.hpp"
#include "bess/errors.hpp"
#include "bess/mpc.hpp"
#include "support.hpp"

using namespace bess;

namespace {

Forecast forecast_of(const std::vector<double>& load, const std::vector<double>& pv) {
  return {load, pv, static_cast<int>(load.size())};
}

MpcConfig config_for(int horizon) {
  MpcConfig c;
  c.horizon_steps = horizon;
  return c;
}

MpcPlan plan_instance(const testing::MpcInstance& m, TieBreak tb = TieBreak::max_soc) {
  MpcConfig c = config_for(static_cast<int>(m.load.size()));
  c.alpha = m.alpha;
  c.beta = m.beta;
  c.c_tp = m.c_tp;
  c.tie_break = tb;
  return plan({m.soc0}, forecast_of(m.load, m.pv), m.dct, m.spec, m.soc_req, c, m.dt);
}

}  // namespace

TEST_CASE("problem size and layout") {
  const MpcConfig c = config_for(16);
  const std::vector<double> z(16, 0.0), dct(16, 100.0);
  const auto p = build_problem({100}, forecast_of(z, z), dct, BatterySpec::full_range(710, 340), 0, c, 0.25);
  CHECK(p.n_vars == 66);
  CHECK(MpcLayout{16}.dct_slack() == 65);
  const std::vector<double> short_dct(15, 100.0);
  CHECK_THROWS_AS(build_problem({100}, forecast_of(z, z), short_dct, BatterySpec::full_range(710, 340), 0, c, 0.25),
                  DimensionMismatch);
}

TEST_CASE("nothing to do when load sits under the threshold with no PV") {
  const std::vector<double> load(16, 200.0), pv(16, 0.0), dct(16, 300.0);
  const auto spec = BatterySpec::full_range(710, 340);
  const auto pl = plan({100}, forecast_of(load, pv), dct, spec, 100, config_for(16), 0.25);
  for (double s : pl.p_sell) CHECK(s == doctest::Approx(0.0));
  CHECK(pl.soc_slack_kwh == doctest::Approx(0.0));
  CHECK(pl.dct_slack_kw == doctest::Approx(0.0));
  CHECK(pl.soc_trajectory.size() == 17);
}

TEST_CASE("surplus PV is stored rather than sold") {
  const std::vector<double> load(4, 100.0), pv(4, 150.0), dct(4, 300.0);
  const auto spec = BatterySpec::full_range(710, 340);
  const auto pl = plan({0}, forecast_of(load, pv), dct, spec, 0, config_for(4), 0.25);
  for (int t = 0; t < 4; ++t) {
    CHECK(pl.p_cha_star[static_cast<std::size_t>(t)] == doctest::Approx(50.0));
    CHECK(pl.p_sell[static_cast<std::size_t>(t)] == doctest::Approx(0.0).epsilon(1e-9));
  }
  CHECK(pl.soc_trajectory.back() == doctest::Approx(50.0));
}

TEST_CASE("property: LP plan beats or ties the 1 kW brute force") {
  testing::Rng rng(4242);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = testing::random_mpc_instance(rng);
    const auto pl = plan_instance(m);
    const double oracle = testing::mpc_brute_force(m);
    CHECK(pl.objective_value <= oracle + 1e-3);

    std::vector<double> b;
    for (std::size_t t = 0; t < m.load.size(); ++t) b.push_back(pl.p_dis_star[t] - pl.p_cha_star[t]);
    const auto replay = testing::mpc_cost(m, b);
    REQUIRE(replay.has_value());
    CHECK(*replay == doctest::Approx(pl.objective_value).epsilon(1e-7).scale(1.0));
    for (std::size_t t = 0; t < m.load.size(); ++t) {
      CHECK(std::min(pl.p_cha_star[t], pl.p_dis_star[t]) <= 1e-6);
    }
  }
}

TEST_CASE("property: plans are always feasible and SOC safe") {
  testing::Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const int T = rng.integer(1, 24);
    const auto spec = BatterySpec::full_range(rng.uniform(20, 800), rng.uniform(10, 600));
    std::vector<double> load, pv, dct;
    for (int t = 0; t < T; ++t) {
      load.push_back(rng.uniform(0, 600));
      pv.push_back(rng.coin() ? rng.uniform(0, 600) : 0.0);
      dct.push_back(rng.uniform(0, 400));
    }
    MpcConfig c = config_for(T);
    c.tie_break = rng.coin() ? TieBreak::max_soc : TieBreak::none;
    const double soc0 = rng.uniform(spec.soc_min_kwh, spec.soc_max_kwh);
    const double req = rng.uniform(spec.soc_min_kwh, spec.soc_max_kwh);
    const auto pl = plan({soc0}, forecast_of(load, pv), dct, spec, req, c, 0.25);
    for (double s : pl.soc_trajectory) {
      CHECK(s >= spec.soc_min_kwh - 1e-9);
      CHECK(s <= spec.soc_max_kwh + 1e-9);
    }
    for (int t = 0; t < T; ++t) {
      const auto k = static_cast<std::size_t>(t);
      CHECK(std::min(pl.p_cha_star[k], pl.p_dis_star[k]) <= 1e-6);
      const double residual = pl.p_sell[k] - pl.p_pur[k] - pl.p_dis_star[k] + pl.p_cha_star[k] - pv[k] + load[k];
      CHECK(std::abs(residual) <= 1e-6);
    }
  }
}

TEST_CASE("tie-break pass keeps the optimal objective") {
  testing::Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = testing::random_mpc_instance(rng);
    const auto a = plan_instance(m, TieBreak::none);
    const auto b = plan_instance(m, TieBreak::max_soc);
    CHECK(b.objective_value == doctest::Approx(a.objective_value).epsilon(1e-7).scale(1.0));
    double sa = 0, sb = 0;
    for (std::size_t t = 1; t < a.soc_trajectory.size(); ++t) {
      sa += a.soc_trajectory[t];
      sb += b.soc_trajectory[t];
    }
    CHECK(sb >= sa - 1e-6);
  }
  CHECK(parse_tie_break("none") == TieBreak::none);
  CHECK(parse_tie_break(to_string(TieBreak::max_soc)) == TieBreak::max_soc);
  CHECK_THROWS_AS(parse_tie_break("min_soc"), InvalidArgument);
}

TEST_CASE("hard constraints agree with the soft form when slacks are idle") {
  testing::Rng rng(31);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto m = testing::random_mpc_instance(rng);
    const auto soft = plan_instance(m, TieBreak::none);
    if (soft.soc_slack_kwh > 1e-9 || soft.dct_slack_kw > 1e-9) continue;
    MpcConfig c = config_for(static_cast<int>(m.load.size()));
    c.hard_constraints = true;
    c.tie_break = TieBreak::none;
    const auto hard = plan({m.soc0}, forecast_of(m.load, m.pv), m.dct, m.spec, m.soc_req, c, m.dt);
    CHECK(hard.objective_value == doctest::Approx(soft.objective_value).epsilon(1e-7).scale(1.0));
    ++compared;
  }
  CHECK(compared > 5);

  // An impossible threshold has no hard solution.
  MpcConfig c = config_for(2);
  c.hard_constraints = true;
  const std::vector<double> load{500, 500}, pv{0, 0}, dct{0, 0};
  CHECK_THROWS_AS(plan({0}, forecast_of(load, pv), dct, BatterySpec::full_range(10, 10), 0, c, 0.25),
                  SolverFailure);
}

TEST_CASE("soc_req from daily shaving requirements") {
  const auto spec = BatterySpec{710, 340, 20, 340};
  MpcConfig c;
  CHECK(soc_req(std::vector<double>{0.0}, c, spec).kwh == 20);
  const auto none = soc_req({}, c, spec);
  CHECK(none.fallback);
  CHECK(none.kwh == 20);

  std::vector<double> net(96, 100.0), dct(96, 300.0);
  net[50] = 340.0;
  const double need = daily_shaving_requirement(net, dct, 0.25);
  CHECK(need == doctest::Approx(10.0));
  CHECK(soc_req(std::vector<double>{need}, c, BatterySpec::full_range(710, 340)).kwh == doctest::Approx(10.0));
  CHECK(soc_req(std::vector<double>{need}, c, spec).kwh == 20);

  c.soc_req_mode = SocReqMode::fixed;
  c.soc_req_fixed_kwh = 100;
  CHECK(soc_req({}, c, spec).kwh == 100);

  // Contiguous runs accumulate, separate runs do not.
  net[51] = 340.0;
  net[60] = 340.0;
  CHECK(daily_shaving_requirement(net, dct, 0.25) == doctest::Approx(20.0));

  MpcConfig w;
  w.soc_req_window_days = 2;
  CHECK(soc_req(std::vector<double>{300, 10, 30}, w, BatterySpec::full_range(710, 340)).kwh ==
        doctest::Approx(20.0));
}

TEST_CASE("property: DCT slack stays idle when the greedy walk is feasible") {
  testing::Rng rng(61);
  int checked = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const int T = 16;
    const auto spec = BatterySpec::full_range(rng.uniform(50, 400), rng.uniform(50, 300));
    std::vector<double> load, pv, dct;
    for (int t = 0; t < T; ++t) {
      load.push_back(rng.uniform(100, 400));
      pv.push_back(rng.uniform(0, 200));
      dct.push_back(rng.uniform(150, 350));
    }
    std::vector<double> net;
    for (int t = 0; t < T; ++t) net.push_back(load[static_cast<std::size_t>(t)] - pv[static_cast<std::size_t>(t)]);
    const double soc0 = rng.uniform(0, spec.soc_max_kwh);
    if (testing::greedy_violations(net, dct, spec, 0.25, soc0) > 0) continue;
    ++checked;
    const auto pl = plan({soc0}, forecast_of(load, pv), dct, spec, rng.uniform(0, spec.soc_max_kwh),
                         config_for(T), 0.25);
    CHECK(pl.dct_slack_kw <= 1e-6);
  }
  CHECK(checked > 10);
}

TEST_CASE("more PV capacity to absorb never raises the amount sold") {
  // Doubling the battery cannot make the optimal sale larger.
  const std::vector<double> load(16, 100.0), pv(16, 220.0), dct(16, 300.0);
  double prev = INFINITY;
  for (double cap : {20.0, 80.0, 200.0, 400.0}) {
    const auto pl = plan({0}, forecast_of(load, pv), dct, BatterySpec::full_range(710, cap), 0, config_for(16), 0.25);
    double sold = 0;
    for (double s : pl.p_sell) sold += s;
    CHECK(sold <= prev + 1e-6);
    prev = sold;
  }
}
