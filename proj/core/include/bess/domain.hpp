#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "bess/calendar.hpp"

namespace bess {

inline constexpr int kDefaultStepMinutes = 15;

/// Absolute tolerance on stored energy when checking SOC bounds (kWh).
inline constexpr double kSocTolerance = 1e-9;
/// Absolute tolerance on power quantities (kW).
inline constexpr double kPowerTolerance = 1e-9;

/// Fixed-cadence sequence of power samples in kW.
///
/// Sample `i` covers the half-open interval `[start + i*step, start + (i+1)*step)`.
class PowerSeries {
 public:
  PowerSeries() = default;
  /// Throws InvalidArgument when the cadence does not divide a day, the
  /// series is empty, or any value is not finite.
  PowerSeries(Timestamp start, int step_minutes, std::vector<double> values);

  Timestamp start() const { return start_; }
  int step_minutes() const { return step_minutes_; }
  double step_hours() const { return step_minutes_ / 60.0; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  int steps_per_day() const { return kMinutesPerDay / step_minutes_; }

  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  Timestamp time_at(std::size_t i) const {
    return start_.plus_minutes(static_cast<std::int64_t>(i) * step_minutes_);
  }
  /// Exclusive end of the last interval.
  Timestamp end() const { return time_at(values_.size()); }

  double max() const;
  double min() const;

  /// True if `other` has the same start, cadence, and length.
  bool aligned_with(const PowerSeries& other) const;

  /// Throws NegativePower naming `what` if any sample is below zero.
  void require_non_negative(std::string_view what) const;

  PowerSeries slice(std::size_t first, std::size_t count) const;

 private:
  Timestamp start_{};
  int step_minutes_ = kDefaultStepMinutes;
  std::vector<double> values_;
};

/// Nameplate limits of the battery.
struct BatterySpec {
  double p_max_kw = 0.0;
  double capacity_kwh = 0.0;
  double soc_min_kwh = 0.0;
  double soc_max_kwh = 0.0;
  /// Charging efficiency hook; the controllers and acceptance runs use 1.0.
  double charge_efficiency = 1.0;

  /// Battery usable over the full range [0, capacity].
  static BatterySpec full_range(double p_max_kw, double capacity_kwh);

  /// Throws InvalidArgument if the limits are inconsistent. A zero-width
  /// SOC range (soc_min == soc_max) is accepted and models "no battery".
  void validate() const;

  double usable_kwh() const { return soc_max_kwh - soc_min_kwh; }
};

struct BatteryState {
  double soc_kwh = 0.0;
};

struct Dispatch {
  double p_cha_kw = 0.0;
  double p_dis_kw = 0.0;

  /// Battery power as seen by the bus: positive when discharging.
  double net_kw() const { return p_dis_kw - p_cha_kw; }

  friend bool operator==(const Dispatch&, const Dispatch&) = default;
};

struct StepOutcome {
  double p_pur_kw = 0.0;
  double p_sell_kw = 0.0;
  double soc_after_kwh = 0.0;
};

/// Remaining room above the current state, in kWh.
inline double headroom_kwh(const BatteryState& s, const BatterySpec& b) {
  return b.soc_max_kwh - s.soc_kwh > 0.0 ? b.soc_max_kwh - s.soc_kwh : 0.0;
}
/// Energy that can still be drawn before hitting soc_min, in kWh.
inline double available_kwh(const BatteryState& s, const BatterySpec& b) {
  return s.soc_kwh - b.soc_min_kwh > 0.0 ? s.soc_kwh - b.soc_min_kwh : 0.0;
}

/// Applies one interval of battery action against load and PV.
///
/// Grid power is `load - pv - (dis - cha)`, split into a purchase or a sale.
/// Dispatches that exceed p_max or drive SOC out of bounds are rejected, not
/// clamped.
StepOutcome apply_dispatch(double load_kw, double pv_kw, const Dispatch& dispatch,
                           const BatteryState& state, const BatterySpec& spec,
                           double step_hours);

/// |pv + (dis - cha) + (pur - sell) - load|
double balance_residual(double load_kw, double pv_kw, const Dispatch& dispatch,
                        const StepOutcome& outcome);

}  // namespace bess
