// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   bess_acceptance [--workdir DIR]
//
// Criteria 4-8 share one set of synthetic year runs. Criterion 9 drives the
// bess_lab executable when it was built alongside.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bess/dct_planner.hpp"
#include "bess/lp.hpp"
#include "bess/mpc.hpp"
#include "bess/simulator.hpp"
#include "bess/tariff.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace bess;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Verdict& v) {
  std::cout << fmt::format("criterion {} {}: {} ({})", id, v.pass ? "PASS" : "FAIL", name, v.detail)
            << std::endl;
  if (!v.pass) ++failures;
}

std::string pct(const std::optional<double>& v) {
  return v ? fmt::format("{:.2f}%", 100.0 * *v) : "n/a";
}

// ---------------------------------------------------------------------------

Verdict lp_oracle() {
  const auto t0 = Clock::now();
  testing::Rng rng(20230701);
  int mismatches = 0, optimal = 0, infeasible = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = testing::random_lp(rng, true);
    const auto s = lp::solve(p);
    const auto oracle = testing::vertex_enumeration(p);
    if (!oracle) {
      ++infeasible;
      if (s.status != lp::LpStatus::infeasible) ++mismatches;
      continue;
    }
    ++optimal;
    if (s.status != lp::LpStatus::optimal) {
      ++mismatches;
      continue;
    }
    const double rel = std::abs(s.objective_value - oracle->objective) /
                       std::max(1.0, std::abs(oracle->objective));
    worst = std::max(worst, rel);
    if (rel > 1e-6) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 10.0,
          fmt::format("{} optimal, {} infeasible, {} mismatches, worst rel err {:.1e}, {:.2f} s",
                      optimal, infeasible, mismatches, worst, secs)};
}

Verdict mpc_oracle() {
  const auto t0 = Clock::now();
  testing::Rng rng(20230702);
  int above = 0, simultaneous = 0;
  double worst_gap = -INFINITY;
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = testing::random_mpc_instance(rng);
    MpcConfig c;
    c.horizon_steps = static_cast<int>(m.load.size());
    c.alpha = m.alpha;
    c.beta = m.beta;
    c.c_tp = m.c_tp;
    const Forecast f{m.load, m.pv, c.horizon_steps};
    const auto pl = plan({m.soc0}, f, m.dct, m.spec, m.soc_req, c, m.dt);
    const double oracle = testing::mpc_brute_force(m);
    worst_gap = std::max(worst_gap, pl.objective_value - oracle);
    if (pl.objective_value > oracle + 1e-3) ++above;
    for (std::size_t t = 0; t < m.load.size(); ++t) {
      if (std::min(pl.p_cha_star[t], pl.p_dis_star[t]) > 1e-6) ++simultaneous;
    }
  }
  const double secs = seconds_since(t0);
  return {above == 0 && simultaneous == 0 && secs < 60.0,
          fmt::format("{} above oracle, {} simultaneous steps, max LP-oracle gap {:.3g}, {:.2f} s",
                      above, simultaneous, worst_gap, secs)};
}

Verdict billing() {
  const auto tariff = builtin_pge_tariff();
  const auto july = [](const std::vector<double>& day) {
    std::vector<double> v;
    for (int d = 0; d < 31; ++d) v.insert(v.end(), day.begin(), day.end());
    return PowerSeries(make_timestamp(2023, 7, 1), 15, std::move(v));
  };
  std::vector<double> spike(96, 50.0);
  for (int k = 13 * 4; k < 14 * 4; ++k) spike[static_cast<std::size_t>(k)] = 200.0;
  const double got[3] = {dc_cost(july(std::vector<double>(96, 100.0)), tariff, 7).dc_cost_usd,
                         dc_cost(july(std::vector<double>(96, 0.0)), tariff, 7).dc_cost_usd,
                         dc_cost(july(spike), tariff, 7).dc_cost_usd};
  const double want[3] = {1939.00, 0.0, 3803.00};
  bool ok = true;
  for (int i = 0; i < 3; ++i) ok = ok && std::abs(got[i] - want[i]) < 0.005;
  return {ok, fmt::format("${:.2f}, ${:.2f}, ${:.2f}", got[0], got[1], got[2])};
}

// ---------------------------------------------------------------------------
// Year runs

struct Run {
  SimulationResult result;
  BatterySpec battery;
  double seconds = 0.0;
};

ProfileSet year(LoadShape shape) {
  SyntheticProfileSpec spec;
  spec.shape = shape;
  return generate_synthetic(spec);
}

Run run_year(const ProfileSet& profiles, const DctSchedule& dct, ControllerKind controller,
             const BatterySpec& battery, int horizon) {
  SimulationConfig c;
  c.controller = controller;
  c.battery = battery;
  c.mpc.horizon_steps = horizon;
  const auto t0 = Clock::now();
  Run r{simulate(profiles, c, builtin_pge_tariff(), dct), battery, 0.0};
  r.seconds = seconds_since(t0);
  return r;
}

double telescoping_error(const Run& r) {
  double flow = 0.0;
  const auto& res = r.result;
  for (std::size_t i = 0; i < res.soc.size(); ++i) flow += (res.p_cha[i] - res.p_dis[i]) * 0.25;
  return std::abs(res.soc[res.soc.size() - 1] - (res.initial_soc_kwh + flow));
}

std::string describe(const Run& r) {
  const auto& m = r.result.metrics;
  return fmt::format("DC saving {}, PV-util {}, SOC_avg {:.2f}", pct(m.dc_saving), pct(m.pv_utilization),
                     m.soc_avg);
}

bool below(const std::optional<double>& v, double limit) { return v && *v < limit; }

// ---------------------------------------------------------------------------
// Determinism through the CLI

#ifdef BESS_LAB_EXE
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict determinism(const fs::path& workdir) {
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "simulate --synthetic grocery --days 14 --seed 7"},
      {"simulate_rule", "simulate --synthetic theater --days 10 --seed 3 --controller rule_based"},
      {"compare", "compare --synthetic hospital --days 7 --seed 11"},
      {"sweep", "sweep --synthetic grocery --days 5 --seed 2 --dimension horizon"},
  };
  int identical = 0;
  std::string bad;
  for (const auto& [name, args] : commands) {
    std::string first;
    bool ok = true;
    for (int rep = 0; rep < 2 && ok; ++rep) {
      const fs::path out = workdir / "determinism" / fmt::format("{}_{}", name, rep);
      fs::remove_all(out);
      const std::string cmd = fmt::format("\"{}\" {} --out \"{}\" > \"{}.log\" 2>&1", BESS_LAB_EXE, args,
                                          out.string(), out.string());
      if (std::system(cmd.c_str()) != 0) {
        ok = false;
        break;
      }
      const std::string text = slurp(out / "result.json");
      if (text.empty()) ok = false;
      if (rep == 0) first = text;
      else ok = ok && text == first;
    }
    if (ok) ++identical;
    else bad += " " + name;
  }
  return {bad.empty(), fmt::format("{}/{} commands byte-identical{}", identical, commands.size(),
                                   bad.empty() ? "" : ", differing:" + bad)};
}
#endif

}  // namespace

int main(int argc, char** argv) {
  fs::path workdir = fs::temp_directory_path() / "bess_acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--workdir" && i + 1 < argc) {
      workdir = argv[++i];
    } else {
      std::cerr << "usage: bess_acceptance [--workdir DIR]\n";
      return 2;
    }
  }
  fs::create_directories(workdir / "determinism");

  report(1, "LP matches vertex enumeration", lp_oracle());
  report(2, "MPC matches 1 kW brute force", mpc_oracle());
  report(3, "July billing examples", billing());

  const auto tariff = builtin_pge_tariff();
  const auto small = BatterySpec::full_range(280, 170);
  const auto base = BatterySpec::full_range(710, 340);
  const auto large = BatterySpec::full_range(710, 510);

  const auto grocery = year(LoadShape::grocery);
  std::map<std::string, DctSchedule> dct;
  dct.emplace("small", plan_dct(grocery, small, tariff));
  dct.emplace("base", plan_dct(grocery, base, tariff));
  dct.emplace("large", plan_dct(grocery, large, tariff));

  std::cerr << "running synthetic year simulations..." << std::endl;
  const Run rule = run_year(grocery, dct.at("base"), ControllerKind::rule_based, base, 16);
  const Run mpc = run_year(grocery, dct.at("base"), ControllerKind::mpc, base, 16);

  {
    const auto& r = rule.result.metrics;
    const auto& m = mpc.result.metrics;
    const bool ok = m.pv_utilization && *m.pv_utilization >= 0.5 && below(r.pv_utilization, 0.01) &&
                    r.dc_saving && m.dc_saving && std::abs(*m.dc_saving - *r.dc_saving) <= 0.03 &&
                    m.soc_avg < r.soc_avg && mpc.seconds < 300.0;
    report(4, "grocery year trend",
           {ok, fmt::format("rule: {}; MPC: {}; MPC run {:.1f} s", describe(rule), describe(mpc), mpc.seconds)});
  }

  const Run t12 = run_year(grocery, dct.at("base"), ControllerKind::mpc, base, 12);
  const Run t20 = run_year(grocery, dct.at("base"), ControllerKind::mpc, base, 20);
  {
    const Run* runs[3] = {&t12, &mpc, &t20};
    bool ok = true;
    double lo = INFINITY, hi = -INFINITY;
    std::string text;
    for (int i = 0; i < 3; ++i) {
      const auto& m = runs[i]->result.metrics;
      ok = ok && m.pv_utilization && m.dc_saving;
      if (!ok) break;
      if (i > 0) ok = ok && *m.pv_utilization > *runs[i - 1]->result.metrics.pv_utilization;
      lo = std::min(lo, *m.dc_saving);
      hi = std::max(hi, *m.dc_saving);
      text += fmt::format("{}T={}: PV-util {}, DC saving {}", i ? "; " : "", 12 + 4 * i, pct(m.pv_utilization),
                          pct(m.dc_saving));
    }
    ok = ok && hi - lo <= 0.02;
    report(5, "horizon sweep", {ok, fmt::format("{}; DC spread {:.2f} points", text, 100.0 * (hi - lo))});
  }

  const Run mpc_small = run_year(grocery, dct.at("small"), ControllerKind::mpc, small, 16);
  const Run mpc_large = run_year(grocery, dct.at("large"), ControllerKind::mpc, large, 16);
  const Run rule_small = run_year(grocery, dct.at("small"), ControllerKind::rule_based, small, 16);
  const Run rule_large = run_year(grocery, dct.at("large"), ControllerKind::rule_based, large, 16);
  {
    const auto& a = mpc_small.result.metrics.pv_utilization;
    const auto& b = mpc.result.metrics.pv_utilization;
    const auto& c = mpc_large.result.metrics.pv_utilization;
    const bool ok = a && b && c && *a < *b && *b < *c && below(rule_small.result.metrics.pv_utilization, 0.01) &&
                    below(rule.result.metrics.pv_utilization, 0.01) &&
                    below(rule_large.result.metrics.pv_utilization, 0.01);
    report(6, "battery sweep",
           {ok, fmt::format("MPC PV-util {} -> {} -> {}; rule PV-util {} / {} / {}", pct(a), pct(b), pct(c),
                            pct(rule_small.result.metrics.pv_utilization), pct(rule.result.metrics.pv_utilization),
                            pct(rule_large.result.metrics.pv_utilization))});
  }

  const auto hospital = year(LoadShape::hospital);
  const auto theater = year(LoadShape::theater);
  const Run mpc_hospital = run_year(hospital, plan_dct(hospital, base, tariff), ControllerKind::mpc, base, 16);
  const Run mpc_theater = run_year(theater, plan_dct(theater, base, tariff), ControllerKind::mpc, base, 16);
  {
    const auto& h = mpc_hospital.result.metrics.pv_utilization;
    const auto& t = mpc_theater.result.metrics.pv_utilization;
    report(7, "hospital above theater",
           {h && t && *h > *t, fmt::format("hospital {}, theater {}", pct(h), pct(t))});
  }

  {
    const std::vector<std::pair<std::string, const Run*>> runs = {
        {"grocery rule", &rule},       {"grocery MPC", &mpc},          {"T=12", &t12},
        {"T=20", &t20},                {"280/170 MPC", &mpc_small},     {"710/510 MPC", &mpc_large},
        {"280/170 rule", &rule_small}, {"710/510 rule", &rule_large},  {"hospital MPC", &mpc_hospital},
        {"theater MPC", &mpc_theater}};
    bool ok = true;
    double soc_v = 0, residual = 0, tele = 0;
    int feasible_runs = 0;
    std::size_t changed = 0, rescues = 0, forced = 0;
    std::string bad;
    for (const auto& [name, run] : runs) {
      const auto& r = run->result;
      soc_v = std::max(soc_v, r.max_soc_violation_kwh);
      residual = std::max(residual, r.max_balance_residual_kw);
      tele = std::max(tele, telescoping_error(*run));
      bool run_ok = r.max_soc_violation_kwh <= 1e-9 && r.max_balance_residual_kw <= 1e-9 &&
                    telescoping_error(*run) <= 1e-6;
      if (r.controller == ControllerKind::mpc && r.plans_with_dct_slack == 0) {
        ++feasible_runs;
        changed += r.overrides.discharge_changed;
        rescues += r.overrides.dct_rescues;
        forced += r.overrides.forced_discharge;
        run_ok = run_ok && r.overrides.discharge_changed == 0 && r.overrides.dct_rescues == 0;
      }
      if (!run_ok) bad += " [" + name + "]";
      ok = ok && run_ok;
    }
    report(8, "invariants over year runs",
           {ok, fmt::format("{} runs, max SOC violation {:.1e} kWh, max residual {:.1e} kW, max telescoping "
                            "{:.1e} kWh; {} feasible-DCT MPC runs with {} dispatch-changing Case-1 overrides "
                            "and {} DCT rescues ({} Case-1 guard hits agreeing with the plan){}",
                            runs.size(), soc_v, residual, tele, feasible_runs, changed, rescues, forced,
                            bad.empty() ? "" : "; failing:" + bad)});
  }

#ifdef BESS_LAB_EXE
  report(9, "byte-identical result.json on repeat", determinism(workdir));
#else
  report(9, "byte-identical result.json on repeat", {false, "bess_lab was not built"});
#endif

  std::cout << (failures == 0 ? "all criteria PASS" : fmt::format("{} criteria FAIL", failures)) << std::endl;
  return failures == 0 ? 0 : 1;
}
