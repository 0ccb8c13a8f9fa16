#include "bess/domain.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bess/errors.hpp"

namespace bess {

PowerSeries::PowerSeries(Timestamp start, int step_minutes, std::vector<double> values)
    : start_(start), step_minutes_(step_minutes), values_(std::move(values)) {
  if (step_minutes_ <= 0 || kMinutesPerDay % step_minutes_ != 0) {
    throw InvalidArgument(fmt::format("step_minutes {} does not divide 1440", step_minutes_));
  }
  if (values_.empty()) throw InvalidArgument("power series must have at least one sample");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidArgument(fmt::format("non-finite power sample at index {}", i));
    }
  }
}

double PowerSeries::max() const { return *std::max_element(values_.begin(), values_.end()); }
double PowerSeries::min() const { return *std::min_element(values_.begin(), values_.end()); }

bool PowerSeries::aligned_with(const PowerSeries& other) const {
  return start_ == other.start_ && step_minutes_ == other.step_minutes_ &&
         values_.size() == other.values_.size();
}

void PowerSeries::require_non_negative(std::string_view what) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < 0.0) {
      throw NegativePower(fmt::format("{} is negative ({} kW) at {}", what, values_[i],
                                      format_timestamp(time_at(i))));
    }
  }
}

PowerSeries PowerSeries::slice(std::size_t first, std::size_t count) const {
  if (first + count > values_.size() || count == 0) {
    throw InvalidArgument(
        fmt::format("slice [{}, {}) outside series of {}", first, first + count, values_.size()));
  }
  auto b = values_.begin() + static_cast<std::ptrdiff_t>(first);
  return PowerSeries(time_at(first), step_minutes_,
                     std::vector<double>(b, b + static_cast<std::ptrdiff_t>(count)));
}

BatterySpec BatterySpec::full_range(double p_max_kw, double capacity_kwh) {
  BatterySpec spec{p_max_kw, capacity_kwh, 0.0, capacity_kwh, 1.0};
  spec.validate();
  return spec;
}

void BatterySpec::validate() const {
  const bool finite = std::isfinite(p_max_kw) && std::isfinite(capacity_kwh) &&
                      std::isfinite(soc_min_kwh) && std::isfinite(soc_max_kwh);
  if (!finite) throw InvalidArgument("battery limits must be finite");
  if (p_max_kw <= 0.0) throw InvalidArgument("battery p_max_kw must be positive");
  if (!(0.0 <= soc_min_kwh && soc_min_kwh <= soc_max_kwh && soc_max_kwh <= capacity_kwh)) {
    throw InvalidArgument(fmt::format(
        "battery SOC limits must satisfy 0 <= soc_min ({}) <= soc_max ({}) <= capacity ({})",
        soc_min_kwh, soc_max_kwh, capacity_kwh));
  }
  if (!(charge_efficiency > 0.0 && charge_efficiency <= 1.0)) {
    throw InvalidArgument("charge_efficiency must lie in (0, 1]");
  }
}

StepOutcome apply_dispatch(double load_kw, double pv_kw, const Dispatch& dispatch,
                           const BatteryState& state, const BatterySpec& spec,
                           double step_hours) {
  if (!std::isfinite(load_kw) || !std::isfinite(pv_kw) || !std::isfinite(dispatch.p_cha_kw) ||
      !std::isfinite(dispatch.p_dis_kw) || !std::isfinite(state.soc_kwh)) {
    throw InvalidArgument("apply_dispatch: non-finite input");
  }
  if (!(step_hours > 0.0)) throw InvalidArgument("apply_dispatch: step_hours must be positive");

  const auto check_power = [&](double p, const char* name) {
    if (p < -kPowerTolerance || p > spec.p_max_kw + kPowerTolerance) {
      throw PowerLimitViolation(
          fmt::format("{} power {} kW outside [0, {}] kW", name, p, spec.p_max_kw));
    }
  };
  check_power(dispatch.p_cha_kw, "charge");
  check_power(dispatch.p_dis_kw, "discharge");

  const double soc_after =
      state.soc_kwh +
      (spec.charge_efficiency * dispatch.p_cha_kw - dispatch.p_dis_kw) * step_hours;
  if (soc_after < spec.soc_min_kwh - kSocTolerance ||
      soc_after > spec.soc_max_kwh + kSocTolerance) {
    throw SocBoundViolation(fmt::format("dispatch drives SOC to {} kWh, outside [{}, {}] kWh",
                                        soc_after, spec.soc_min_kwh, spec.soc_max_kwh));
  }

  const double grid = load_kw - pv_kw - dispatch.net_kw();
  return {grid > 0.0 ? grid : 0.0, grid < 0.0 ? -grid : 0.0, soc_after};
}

double balance_residual(double load_kw, double pv_kw, const Dispatch& dispatch,
                        const StepOutcome& outcome) {
  return std::abs(pv_kw + dispatch.net_kw() + (outcome.p_pur_kw - outcome.p_sell_kw) - load_kw);
}

}  // namespace bess
