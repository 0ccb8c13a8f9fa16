#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "bess/dct_planner.hpp"
#include "bess/domain.hpp"
#include "bess/forecast.hpp"
#include "bess/ingest.hpp"
#include "bess/metrics.hpp"
#include "bess/mpc.hpp"
#include "bess/tariff.hpp"

namespace bess {

enum class ControllerKind { rule_based, mpc };

std::string_view to_string(ControllerKind kind);
ControllerKind parse_controller(std::string_view name);

enum class DctSource { planned, user };

struct SimulationConfig {
  ControllerKind controller = ControllerKind::mpc;
  BatterySpec battery = BatterySpec::full_range(710.0, 340.0);
  MpcConfig mpc;
  ForecasterKind forecaster = ForecasterKind::perfect;
  /// Defaults to soc_max.
  std::optional<double> initial_soc_kwh;
  DctSource dct_source = DctSource::planned;
  DctPlanMode dct_plan_mode = DctPlanMode::same_month;
  /// Inclusive calendar dates; both default to the full profile span.
  std::optional<Timestamp> span_start;
  std::optional<Timestamp> span_end;

  void validate() const;
  double initial_soc() const { return initial_soc_kwh.value_or(battery.soc_max_kwh); }
};

struct OverrideCounts {
  /// Case 1 guard held.
  std::size_t forced_discharge = 0;
  /// Case 2 guard held.
  std::size_t forced_charge = 0;
  /// Case 1 held and the guideline on its own would have bought above DCT.
  std::size_t dct_rescues = 0;
  /// An override changed the executed dispatch by more than 1e-6 kW.
  std::size_t guideline_changed = 0;
  /// The part of guideline_changed caused by Case 1.
  std::size_t discharge_changed = 0;
};

struct SimulationResult {
  ControllerKind controller = ControllerKind::mpc;
  PowerSeries p_pur;
  PowerSeries p_sell;
  PowerSeries p_cha;
  PowerSeries p_dis;
  /// SOC after each interval.
  PowerSeries soc;
  PowerSeries dct;
  double initial_soc_kwh = 0.0;
  std::vector<MonthlyBill> monthly_bills;
  OverrideCounts overrides;
  Metrics metrics;
  BaselineSummary baseline;

  double max_balance_residual_kw = 0.0;
  double max_soc_violation_kwh = 0.0;
  std::size_t soc_req_fallback_days = 0;
  std::size_t mpc_solves = 0;
  std::size_t lp_iterations = 0;
  /// Intervals whose MPC plan needed a nonzero DCT slack.
  std::size_t plans_with_dct_slack = 0;
};

struct SimulationHooks {
  /// Receives the first `lp_dump_limit` MPC problems in the plain-text LP layout.
  std::ostream* lp_dump = nullptr;
  std::size_t lp_dump_limit = 96;
};

/// Restricts profiles to the configured span (whole days).
ProfileSet select_span(const ProfileSet& profiles, const SimulationConfig& config);

/// Runs the closed loop over `profiles` with the given thresholds, which
/// must be aligned with the profiles.
SimulationResult simulate(const ProfileSet& profiles, const SimulationConfig& config,
                          const TariffSchedule& tariff, const DctSchedule& dct,
                          const SimulationHooks& hooks = {});

/// Plans thresholds from the profiles (config.dct_plan_mode) and runs the
/// closed loop. Throws ConfigError when dct_source is `user`.
SimulationResult simulate(const ProfileSet& profiles, const SimulationConfig& config,
                          const TariffSchedule& tariff);

/// `timestamp,p_pur_kw,p_sell_kw,p_cha_kw,p_dis_kw,soc_kwh,dct_kw`
void write_traces_csv(const SimulationResult& result, std::ostream& out);

}  // namespace bess
