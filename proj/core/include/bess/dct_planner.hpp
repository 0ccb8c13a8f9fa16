#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "bess/domain.hpp"
#include "bess/ingest.hpp"
#include "bess/tariff.hpp"

namespace bess {

enum class DctProvenance { planned, user_supplied };

/// Flat threshold chosen for one tariff component in one month.
struct ComponentThreshold {
  int year = 0;
  int month = 0;
  ComponentKind kind = ComponentKind::anytime;
  double threshold_kw = 0.0;
};

/// Per-interval demand-charge threshold DCT(t) in kW.
struct DctSchedule {
  PowerSeries thresholds;
  DctProvenance provenance = DctProvenance::planned;
  std::vector<ComponentThreshold> components;
  /// Set when the battery could not lower some month's anytime threshold at all.
  bool infeasible_warning = false;

  double operator[](std::size_t i) const { return thresholds[i]; }
  std::size_t size() const { return thresholds.size(); }
};

/// Threshold bisection stops once the bracket is narrower than this (kW).
inline constexpr double kDctTolerance = 0.01;

struct GreedyShaveResult {
  std::size_t violations = 0;
  double max_violation_kw = 0.0;
  std::vector<double> p_pur_kw;
};

/// Perfect-foresight greedy battery walk: discharge whatever net load exceeds
/// the threshold, charge toward the threshold otherwise. Infinite thresholds
/// mean "unconstrained" (charge at the full rate). Starts at `initial_soc_kwh`.
GreedyShaveResult greedy_peak_shave(std::span<const double> net_load_kw,
                                    std::span<const double> threshold_kw,
                                    const BatterySpec& spec, double step_hours,
                                    double initial_soc_kwh);

/// Plans flat per-component thresholds for every calendar month in
/// `reference` and composes DCT(t) as the minimum over active components.
DctSchedule plan_dct(const ProfileSet& reference, const BatterySpec& spec,
                     const TariffSchedule& tariff);

enum class DctPlanMode {
  /// Each month is planned from its own data (perfect hindsight).
  same_month,
  /// Each month reuses thresholds planned on the previous month's data; the
  /// first month falls back to hindsight.
  previous_month,
};

DctSchedule plan_dct(const ProfileSet& profiles, const BatterySpec& spec,
                     const TariffSchedule& tariff, DctPlanMode mode);

/// Wraps user thresholds. Throws InvalidThreshold on negative entries.
DctSchedule user_dct(PowerSeries values);

DctSchedule read_dct_csv(std::istream& in);
DctSchedule load_dct_csv(const std::filesystem::path& path);
void write_dct_csv(const DctSchedule& dct, std::ostream& out);
void write_dct_csv(const DctSchedule& dct, const std::filesystem::path& path);

}  // namespace bess
