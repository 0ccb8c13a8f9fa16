#include "bess/tariff.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "bess/errors.hpp"

namespace bess {

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::anytime: return "anytime";
    case ComponentKind::partial_peak: return "partial_peak";
    case ComponentKind::peak: return "peak";
  }
  return "unknown";
}

ComponentKind parse_component_kind(std::string_view name) {
  if (name == "anytime") return ComponentKind::anytime;
  if (name == "partial_peak") return ComponentKind::partial_peak;
  if (name == "peak") return ComponentKind::peak;
  throw InvalidArgument(fmt::format("unknown demand-charge component '{}'", name));
}

bool DemandChargeComponent::active_at(int minute) const {
  return std::any_of(windows.begin(), windows.end(),
                     [minute](const TimeWindow& w) { return w.contains(minute); });
}

bool DemandChargeComponent::has_window() const {
  return std::any_of(windows.begin(), windows.end(),
                     [](const TimeWindow& w) { return !w.empty(); });
}

void TariffSchedule::validate() const {
  for (const auto& c : components) {
    if (!(c.rate_usd_per_kw >= 0.0)) throw InvalidArgument("demand-charge rate must be >= 0");
    if (c.windows.size() > 2) throw InvalidArgument("a component has at most two windows");
    for (const auto& w : c.windows) {
      if (w.start_min < 0 || w.end_min > kMinutesPerDay || w.start_min > w.end_min) {
        throw InvalidArgument(
            fmt::format("invalid window [{}, {}) in {} component", w.start_min, w.end_min,
                        to_string(c.kind)));
      }
    }
    if (c.kind == ComponentKind::anytime &&
        !(c.windows.size() >= 1 && c.windows[0] == TimeWindow{0, kMinutesPerDay})) {
      throw InvalidArgument("anytime component must cover 0:00-24:00");
    }
  }
  for (int m = 1; m <= 12; ++m) {
    for (ComponentKind kind : kComponentKinds) {
      const auto n = std::count_if(components.begin(), components.end(), [&](const auto& c) {
        return c.kind == kind && c.applies_to(m);
      });
      if (n != 1) {
        throw InvalidArgument(fmt::format("month {} has {} {} components, expected 1", m, n,
                                          to_string(kind)));
      }
    }
  }
}

const DemandChargeComponent& TariffSchedule::component(int month, ComponentKind kind) const {
  for (const auto& c : components) {
    if (c.kind == kind && c.applies_to(month)) return c;
  }
  throw InvalidArgument(
      fmt::format("tariff has no {} component for month {}", to_string(kind), month));
}

TariffSchedule builtin_pge_tariff() {
  constexpr auto hm = [](int h, int m) { return h * 60 + m; };
  constexpr MonthSet summer = month_bit(5) | month_bit(6) | month_bit(7) | month_bit(8) |
                              month_bit(9) | month_bit(10);
  constexpr MonthSet winter = kAllMonths & ~summer;
  const TimeWindow all_day{0, kMinutesPerDay};
  const TimeWindow none{0, 0};

  TariffSchedule t;
  t.components = {
      {ComponentKind::anytime, 17.44, {all_day, none}, summer},
      {ComponentKind::partial_peak, 0.50, {{hm(8, 30), hm(12, 0)}, {hm(18, 0), hm(21, 30)}},
       summer},
      {ComponentKind::peak, 1.45, {{hm(12, 0), hm(18, 0)}, none}, summer},
      {ComponentKind::anytime, 17.44, {all_day, none}, winter},
      {ComponentKind::partial_peak, 0.01, {{hm(8, 30), hm(21, 30)}, none}, winter},
      {ComponentKind::peak, 0.00, {none, none}, winter},
  };
  return t;
}

double MonthlyBill::peak_for(ComponentKind kind) const {
  switch (kind) {
    case ComponentKind::anytime: return anytime_peak_kw;
    case ComponentKind::partial_peak: return partial_peak_kw;
    case ComponentKind::peak: return peak_peak_kw;
  }
  return 0.0;
}

namespace {

MonthlyBill bill_range(const PowerSeries& p, std::size_t first, std::size_t last,
                       const TariffSchedule& tariff) {
  const CivilTime c = to_civil(p.time_at(first));
  MonthlyBill bill;
  bill.year = c.year;
  bill.month = c.month;

  const auto& any = tariff.component(c.month, ComponentKind::anytime);
  const auto& partial = tariff.component(c.month, ComponentKind::partial_peak);
  const auto& peak = tariff.component(c.month, ComponentKind::peak);
  for (std::size_t i = first; i < last; ++i) {
    const double v = p[i];
    if (v < 0.0) {
      throw InvalidArgument(fmt::format("purchased power is negative at {}",
                                        format_timestamp(p.time_at(i))));
    }
    const int minute = minute_of_day(p.time_at(i));
    if (any.active_at(minute)) bill.anytime_peak_kw = std::max(bill.anytime_peak_kw, v);
    if (partial.active_at(minute)) bill.partial_peak_kw = std::max(bill.partial_peak_kw, v);
    if (peak.active_at(minute)) bill.peak_peak_kw = std::max(bill.peak_peak_kw, v);
  }
  bill.dc_cost_usd = any.rate_usd_per_kw * bill.anytime_peak_kw +
                     partial.rate_usd_per_kw * bill.partial_peak_kw +
                     peak.rate_usd_per_kw * bill.peak_peak_kw;
  return bill;
}

}  // namespace

MonthlyBill dc_cost(const PowerSeries& p_pur, const TariffSchedule& tariff, int month) {
  const CivilTime c = to_civil(p_pur.start());
  const Timestamp month_start = make_timestamp(c.year, month, 1);
  const Timestamp month_end =
      month == 12 ? make_timestamp(c.year + 1, 1, 1) : make_timestamp(c.year, month + 1, 1);
  if (p_pur.start() != month_start || p_pur.end() != month_end) {
    throw SpanMismatch(fmt::format("series [{}, {}) does not span billing month {:04d}-{:02d}",
                                   format_timestamp(p_pur.start()),
                                   format_timestamp(p_pur.end()), c.year, month));
  }
  return bill_range(p_pur, 0, p_pur.size(), tariff);
}

std::vector<IndexRange> calendar_month_ranges(const PowerSeries& series) {
  std::vector<IndexRange> ranges;
  std::size_t first = 0;
  while (first < series.size()) {
    const int month = month_of(series.time_at(first));
    std::size_t last = first + 1;
    while (last < series.size() && month_of(series.time_at(last)) == month) ++last;
    ranges.push_back({first, last - first});
    first = last;
  }
  return ranges;
}

std::vector<MonthlyBill> bill_by_month(const PowerSeries& p_pur, const TariffSchedule& tariff) {
  std::vector<MonthlyBill> bills;
  for (const auto& r : calendar_month_ranges(p_pur)) {
    bills.push_back(bill_range(p_pur, r.first, r.first + r.count, tariff));
  }
  return bills;
}

double total_cost(const std::vector<MonthlyBill>& bills) {
  double sum = 0.0;
  for (const auto& b : bills) sum += b.dc_cost_usd;
  return sum;
}

}  // namespace bess
