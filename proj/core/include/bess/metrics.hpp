#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bess/ingest.hpp"
#include "bess/tariff.hpp"

namespace bess {

struct SimulationResult;

/// Evaluation quantities of one run against the no-battery baseline.
struct Metrics {
  /// 1 - E_sell(with) / E_sell(without); empty when the baseline exports nothing.
  std::optional<double> pv_utilization;
  /// (baseline cost - cost) / baseline cost; empty when the baseline costs nothing.
  std::optional<double> dc_saving;
  /// Mean SOC in percent of capacity.
  double soc_avg = 0.0;
  double total_sold_kwh = 0.0;
  double total_purchased_kwh = 0.0;
  double dc_cost_usd = 0.0;
};

/// Grid exchange with no battery at all.
struct BaselineSummary {
  double sold_kwh = 0.0;
  double purchased_kwh = 0.0;
  std::vector<MonthlyBill> bills;
  double dc_cost_usd = 0.0;
};

BaselineSummary no_bess_baseline(const ProfileSet& profiles, const TariffSchedule& tariff);

/// Returns nullopt (not applicable) when `baseline_sold_kwh` is zero.
std::optional<double> pv_utilization(double sold_with_bess_kwh, double baseline_sold_kwh);
std::optional<double> pv_utilization(const SimulationResult& with_bess, double baseline_sold_kwh);

/// Throws ZeroBaseline when `no_bess_cost_usd` is not positive.
double dc_saving(double bess_cost_usd, double no_bess_cost_usd);

/// Mean of soc/capacity * 100; zero for a zero-capacity battery.
double soc_avg(std::span<const double> soc_kwh, double capacity_kwh);
double soc_avg(const SimulationResult& result, const BatterySpec& spec);

double energy_kwh(const PowerSeries& power);

// ---------------------------------------------------------------------------
// Tables

/// One row in the controller comparison layout.
struct ComparisonRow {
  std::string label;
  double dc_cost_usd = 0.0;
  std::optional<double> dc_saving;
  std::optional<double> soc_avg;
  std::optional<double> pv_utilization;
};

struct ComparisonTable {
  std::string title;
  std::vector<ComparisonRow> rows;
};

/// One sweep point: rule-based and MPC side by side.
struct SweepRow {
  std::string point;
  std::optional<double> rule_dc_saving;
  std::optional<double> rule_pv_utilization;
  std::optional<double> mpc_dc_saving;
  std::optional<double> mpc_pv_utilization;
};

struct SweepTable {
  std::string title;
  std::vector<SweepRow> rows;
};

std::string render_text(const ComparisonTable& table);
std::string render_csv(const ComparisonTable& table);
std::string render_text(const SweepTable& table);
std::string render_csv(const SweepTable& table);

}  // namespace bess
