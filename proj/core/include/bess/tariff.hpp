#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "bess/domain.hpp"

namespace bess {

/// Half-open minute-of-day window [start_min, end_min). start == end is empty.
struct TimeWindow {
  int start_min = 0;
  int end_min = 0;

  bool empty() const { return start_min == end_min; }
  bool contains(int minute) const { return minute >= start_min && minute < end_min; }

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

enum class ComponentKind { anytime, partial_peak, peak };

inline constexpr std::array kComponentKinds{ComponentKind::anytime, ComponentKind::partial_peak,
                                            ComponentKind::peak};

std::string_view to_string(ComponentKind kind);
ComponentKind parse_component_kind(std::string_view name);

/// Bitmask over calendar months; bit (m-1) set for month m.
using MonthSet = unsigned;
inline constexpr MonthSet kAllMonths = 0xFFFu;
constexpr MonthSet month_bit(int month) { return 1u << (month - 1); }

struct DemandChargeComponent {
  ComponentKind kind = ComponentKind::anytime;
  double rate_usd_per_kw = 0.0;
  std::vector<TimeWindow> windows;  // at most two
  MonthSet months = 0;

  bool applies_to(int month) const { return (months & month_bit(month)) != 0; }
  bool active_at(int minute_of_day) const;
  bool has_window() const;
};

struct TariffSchedule {
  std::vector<DemandChargeComponent> components;

  /// Throws InvalidArgument unless every month has exactly one component of
  /// each kind and every anytime component spans the whole day.
  void validate() const;

  const DemandChargeComponent& component(int month, ComponentKind kind) const;
};

/// PG&E demand-charge rates for customers with renewables: summer May-Oct,
/// winter Nov-Apr.
TariffSchedule builtin_pge_tariff();

struct MonthlyBill {
  int year = 0;
  int month = 0;
  double anytime_peak_kw = 0.0;
  double partial_peak_kw = 0.0;
  double peak_peak_kw = 0.0;
  double dc_cost_usd = 0.0;

  double peak_for(ComponentKind kind) const;
};

/// Demand charge for one full billing month. Intervals are attributed to
/// windows by their start minute. Throws SpanMismatch unless `p_pur` covers
/// exactly the calendar month.
MonthlyBill dc_cost(const PowerSeries& p_pur, const TariffSchedule& tariff, int month);

struct IndexRange {
  std::size_t first = 0;
  std::size_t count = 0;
};

/// Splits a series into runs of intervals sharing a calendar month.
std::vector<IndexRange> calendar_month_ranges(const PowerSeries& series);

/// Bills every calendar month touched by `p_pur`, partial months included.
std::vector<MonthlyBill> bill_by_month(const PowerSeries& p_pur, const TariffSchedule& tariff);

double total_cost(const std::vector<MonthlyBill>& bills);

}  // namespace bess
