#include "bess/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "bess/controllers.hpp"
#include "bess/errors.hpp"

namespace bess {

std::string_view to_string(ControllerKind kind) {
  return kind == ControllerKind::rule_based ? "rule_based" : "mpc";
}

ControllerKind parse_controller(std::string_view name) {
  if (name == "rule_based") return ControllerKind::rule_based;
  if (name == "mpc") return ControllerKind::mpc;
  throw ConfigError(fmt::format("unknown controller '{}' (rule_based, mpc)", name));
}

void SimulationConfig::validate() const {
  try {
    battery.validate();
    if (controller == ControllerKind::mpc) mpc.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const double soc0 = initial_soc();
  if (soc0 < battery.soc_min_kwh || soc0 > battery.soc_max_kwh) {
    throw ConfigError(fmt::format("initial_soc_kwh {} outside [{}, {}]", soc0,
                                  battery.soc_min_kwh, battery.soc_max_kwh));
  }
  if (span_start && span_end && *span_end < *span_start) {
    throw ConfigError("span end precedes span start");
  }
}

ProfileSet select_span(const ProfileSet& profiles, const SimulationConfig& config) {
  if (!config.span_start && !config.span_end) return profiles;
  const Timestamp begin = config.span_start.value_or(profiles.load.start());
  const Timestamp end = config.span_end ? config.span_end->plus_minutes(kMinutesPerDay)
                                        : profiles.load.end();
  if (begin < profiles.load.start() || end > profiles.load.end() || !(begin < end)) {
    throw ConfigError(fmt::format("span [{}, {}) is not covered by the profiles [{}, {})",
                                  format_timestamp(begin), format_timestamp(end),
                                  format_timestamp(profiles.load.start()),
                                  format_timestamp(profiles.load.end())));
  }
  const auto step = profiles.load.step_minutes();
  const auto first = static_cast<std::size_t>((begin.minutes - profiles.load.start().minutes) / step);
  const auto count = static_cast<std::size_t>((end.minutes - begin.minutes) / step);
  return profiles.slice(first, count);
}

namespace {

constexpr double kChangeTolerance = 1e-6;

bool differs(const Dispatch& a, const Dispatch& b) {
  return std::abs(a.p_cha_kw - b.p_cha_kw) > kChangeTolerance ||
         std::abs(a.p_dis_kw - b.p_dis_kw) > kChangeTolerance;
}

std::vector<double> dct_window(const DctSchedule& dct, std::size_t now, int steps) {
  std::vector<double> out(static_cast<std::size_t>(steps));
  const std::size_t last = dct.size() - 1;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = dct[std::min(now + k, last)];
  return out;
}

}  // namespace

SimulationResult simulate(const ProfileSet& profiles, const SimulationConfig& config,
                          const TariffSchedule& tariff, const DctSchedule& dct,
                          const SimulationHooks& hooks) {
  config.validate();
  profiles.validate();
  tariff.validate();
  if (!profiles.load.aligned_with(dct.thresholds)) {
    throw ConfigError("DCT schedule is not aligned with the simulated profiles");
  }

  const BatterySpec& spec = config.battery;
  const std::size_t n = profiles.size();
  const double dt = profiles.load.step_hours();
  const int horizon = config.mpc.horizon_steps;

  std::vector<double> pur(n), sell(n), cha(n), dis(n), soc(n);
  SimulationResult result;
  result.controller = config.controller;
  result.initial_soc_kwh = config.initial_soc();

  BatteryState state{config.initial_soc()};
  std::vector<double> daily_requirements;
  double current_soc_req = spec.soc_min_kwh;
  std::size_t day_first = 0;
  std::size_t dumped = 0;

  const auto refresh_soc_req = [&] {
    const SocReq req = soc_req(daily_requirements, config.mpc, spec);
    current_soc_req = req.kwh;
    if (req.fallback) ++result.soc_req_fallback_days;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double load = profiles.load[i];
    const double pv = profiles.pv[i];
    const double net = load - pv;
    const double threshold = dct[i];

    Dispatch action;
    if (config.controller == ControllerKind::rule_based) {
      action = rule_dispatch(net, threshold, state, spec, dt);
    } else {
      if (minute_of_day(profiles.load.time_at(i)) == 0 || i == 0) {
        if (i > day_first) {
          std::vector<double> day_net(i - day_first);
          for (std::size_t k = day_first; k < i; ++k) day_net[k - day_first] = profiles.net_load(k);
          daily_requirements.push_back(daily_shaving_requirement(
              day_net, dct.thresholds.values().subspan(day_first, i - day_first), dt));
          day_first = i;
        }
        refresh_soc_req();
      }

      Dispatch guideline;
      std::optional<Forecast> forecast;
      try {
        forecast = make_forecast(config.forecaster, profiles, i, horizon);
      } catch (const InsufficientHistory&) {
        // No prior day for persistence: run on real-time rules alone.
      }
      if (forecast) {
        std::ostream* dump =
            hooks.lp_dump != nullptr && dumped < hooks.lp_dump_limit ? hooks.lp_dump : nullptr;
        if (dump != nullptr) ++dumped;
        const MpcPlan p = plan(state, *forecast, dct_window(dct, i, horizon), spec,
                               current_soc_req, config.mpc, dt, dump);
        ++result.mpc_solves;
        result.lp_iterations += p.lp_iterations;
        if (p.dct_slack_kw > kChangeTolerance) ++result.plans_with_dct_slack;
        guideline = p.first_step();
      }

      const RealtimeDecision decision = realtime_decide(net, threshold, guideline, state, spec, dt);
      action = decision.dispatch;
      if (decision.applied != OverrideCase::none) {
        const Dispatch passthrough =
            realtime_decide(0.0, lp::kInfinity, guideline, state, spec, dt).dispatch;
        const bool changed = differs(passthrough, action);
        if (changed) ++result.overrides.guideline_changed;
        if (decision.applied == OverrideCase::forced_discharge) {
          ++result.overrides.forced_discharge;
          if (changed) ++result.overrides.discharge_changed;
          if (net - passthrough.net_kw() > threshold + kChangeTolerance) {
            ++result.overrides.dct_rescues;
          }
        } else {
          ++result.overrides.forced_charge;
        }
      }
    }

    const StepOutcome step = apply_dispatch(load, pv, action, state, spec, dt);
    result.max_balance_residual_kw =
        std::max(result.max_balance_residual_kw, balance_residual(load, pv, action, step));
    result.max_soc_violation_kwh =
        std::max({result.max_soc_violation_kwh, spec.soc_min_kwh - step.soc_after_kwh,
                  step.soc_after_kwh - spec.soc_max_kwh});
    pur[i] = step.p_pur_kw;
    sell[i] = step.p_sell_kw;
    cha[i] = action.p_cha_kw;
    dis[i] = action.p_dis_kw;
    soc[i] = step.soc_after_kwh;
    state.soc_kwh = step.soc_after_kwh;
  }

  const Timestamp start = profiles.load.start();
  const int step_minutes = profiles.load.step_minutes();
  result.p_pur = PowerSeries(start, step_minutes, std::move(pur));
  result.p_sell = PowerSeries(start, step_minutes, std::move(sell));
  result.p_cha = PowerSeries(start, step_minutes, std::move(cha));
  result.p_dis = PowerSeries(start, step_minutes, std::move(dis));
  result.soc = PowerSeries(start, step_minutes, std::move(soc));
  result.dct = dct.thresholds;
  result.monthly_bills = bill_by_month(result.p_pur, tariff);

  result.baseline = no_bess_baseline(profiles, tariff);
  Metrics& m = result.metrics;
  m.total_sold_kwh = energy_kwh(result.p_sell);
  m.total_purchased_kwh = energy_kwh(result.p_pur);
  m.dc_cost_usd = total_cost(result.monthly_bills);
  m.pv_utilization = pv_utilization(m.total_sold_kwh, result.baseline.sold_kwh);
  if (result.baseline.dc_cost_usd > 0.0) {
    m.dc_saving = dc_saving(m.dc_cost_usd, result.baseline.dc_cost_usd);
  }
  m.soc_avg = soc_avg(result, spec);
  return result;
}

SimulationResult simulate(const ProfileSet& profiles, const SimulationConfig& config,
                          const TariffSchedule& tariff) {
  if (config.dct_source == DctSource::user) {
    throw ConfigError("dct_source 'user' needs an explicit DCT schedule");
  }
  const DctSchedule dct = plan_dct(profiles, config.battery, tariff, config.dct_plan_mode);
  return simulate(profiles, config, tariff, dct);
}

void write_traces_csv(const SimulationResult& r, std::ostream& out) {
  out << "timestamp,p_pur_kw,p_sell_kw,p_cha_kw,p_dis_kw,soc_kwh,dct_kw\n";
  for (std::size_t i = 0; i < r.p_pur.size(); ++i) {
    out << fmt::format("{},{},{},{},{},{},{}\n", format_timestamp(r.p_pur.time_at(i)),
                       r.p_pur[i], r.p_sell[i], r.p_cha[i], r.p_dis[i], r.soc[i], r.dct[i]);
  }
}

}  // namespace bess
