#include "bess/dct_planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "bess/errors.hpp"

namespace bess {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct MonthPlan {
  std::vector<ComponentThreshold> components;
  bool warning = false;
};

// Thresholds for the components billed in `month`, sized on `net` whose
// intervals start at the minutes-of-day in `minutes`.
MonthPlan plan_month(std::span<const double> net, std::span<const int> minutes, int year,
                     int month, const BatterySpec& spec, const TariffSchedule& tariff,
                     double step_hours) {
  const std::size_t n = net.size();
  std::vector<double> composite(n, kInf);
  MonthPlan plan;

  for (ComponentKind kind : kComponentKinds) {
    const auto& comp = tariff.component(month, kind);
    if (comp.rate_usd_per_kw <= 0.0 || !comp.has_window()) continue;

    std::vector<std::size_t> members;
    double window_max = 0.0;
    double composite_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!comp.active_at(minutes[i])) continue;
      members.push_back(i);
      window_max = std::max(window_max, net[i]);
      composite_max = std::max(composite_max, composite[i]);
    }
    if (members.empty()) continue;

    std::vector<double> trial = composite;
    const auto feasible = [&](double level) {
      for (std::size_t i : members) trial[i] = std::min(composite[i], level);
      return greedy_peak_shave(net, trial, spec, step_hours, spec.soc_max_kwh).violations == 0;
    };

    // Upper bracket: the composite already in force over the window (or the
    // window's net-load maximum when nothing is) is feasible by construction.
    double hi = std::isfinite(composite_max) ? composite_max : window_max;
    hi = std::max(hi, 0.0);
    double chosen = hi;
    if (hi > 0.0 && feasible(hi - kDctTolerance)) {
      double lo = 0.0;
      if (feasible(lo)) {
        chosen = lo;
      } else {
        hi -= kDctTolerance;
        while (hi - lo > kDctTolerance) {
          const double mid = 0.5 * (lo + hi);
          if (feasible(mid)) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        chosen = hi;
      }
    } else if (kind == ComponentKind::anytime && hi > 0.0) {
      plan.warning = true;
    }

    for (std::size_t i : members) composite[i] = std::min(composite[i], chosen);
    plan.components.push_back({year, month, kind, chosen});
  }
  return plan;
}

std::vector<int> minutes_of(const PowerSeries& s, std::size_t first, std::size_t count) {
  std::vector<int> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = minute_of_day(s.time_at(first + k));
  return out;
}

double compose(const TariffSchedule& tariff, int month, int minute,
               const std::vector<ComponentThreshold>& comps, double fallback) {
  double v = kInf;
  for (const auto& c : comps) {
    if (tariff.component(month, c.kind).active_at(minute)) v = std::min(v, c.threshold_kw);
  }
  return std::isfinite(v) ? v : fallback;
}

}  // namespace

GreedyShaveResult greedy_peak_shave(std::span<const double> net_load_kw,
                                    std::span<const double> threshold_kw,
                                    const BatterySpec& spec, double step_hours,
                                    double initial_soc_kwh) {
  if (net_load_kw.size() != threshold_kw.size()) {
    throw DimensionMismatch("greedy_peak_shave: net load and thresholds differ in length");
  }
  GreedyShaveResult r;
  r.p_pur_kw.resize(net_load_kw.size());
  double soc = initial_soc_kwh;
  for (std::size_t i = 0; i < net_load_kw.size(); ++i) {
    const double net = net_load_kw[i];
    const double thr = threshold_kw[i];
    double battery = 0.0;  // positive = discharge
    if (net > thr) {
      const double avail = std::max(soc - spec.soc_min_kwh, 0.0) / step_hours;
      battery = std::min({net - thr, spec.p_max_kw, avail});
    } else {
      const double room = std::max(spec.soc_max_kwh - soc, 0.0) / step_hours;
      battery = -std::min({thr - net, spec.p_max_kw, room});
    }
    soc -= battery * step_hours;
    const double grid = net - battery;
    r.p_pur_kw[i] = std::max(grid, 0.0);
    const double excess = grid - thr;
    if (excess > kPowerTolerance) {
      ++r.violations;
      r.max_violation_kw = std::max(r.max_violation_kw, excess);
    }
  }
  return r;
}

DctSchedule plan_dct(const ProfileSet& reference, const BatterySpec& spec,
                     const TariffSchedule& tariff) {
  return plan_dct(reference, spec, tariff, DctPlanMode::same_month);
}

DctSchedule plan_dct(const ProfileSet& profiles, const BatterySpec& spec,
                     const TariffSchedule& tariff, DctPlanMode mode) {
  profiles.validate();
  spec.validate();
  tariff.validate();
  const double step_hours = profiles.load.step_hours();
  const std::size_t n = profiles.size();
  std::vector<double> net(n);
  for (std::size_t i = 0; i < n; ++i) net[i] = profiles.net_load(i);

  DctSchedule out;
  out.provenance = DctProvenance::planned;
  std::vector<double> thresholds(n, 0.0);
  const auto ranges = calendar_month_ranges(profiles.load);

  for (std::size_t r = 0; r < ranges.size(); ++r) {
    const auto [first, count] = ranges[r];
    const CivilTime c = to_civil(profiles.load.time_at(first));
    const bool use_previous = mode == DctPlanMode::previous_month && r > 0;
    const IndexRange source = use_previous ? ranges[r - 1] : ranges[r];

    const auto src_minutes = minutes_of(profiles.load, source.first, source.count);
    const MonthPlan plan =
        plan_month(std::span<const double>(net).subspan(source.first, source.count),
                   src_minutes, c.year, c.month, spec, tariff, step_hours);
    out.infeasible_warning = out.infeasible_warning || plan.warning;

    double month_max = 0.0;
    for (std::size_t k = 0; k < count; ++k) month_max = std::max(month_max, net[first + k]);
    for (std::size_t k = 0; k < count; ++k) {
      const int minute = minute_of_day(profiles.load.time_at(first + k));
      thresholds[first + k] = compose(tariff, c.month, minute, plan.components, month_max);
    }
    out.components.insert(out.components.end(), plan.components.begin(), plan.components.end());
  }

  out.thresholds = PowerSeries(profiles.load.start(), profiles.load.step_minutes(),
                               std::move(thresholds));
  return out;
}

DctSchedule user_dct(PowerSeries values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0)) {
      throw InvalidThreshold(fmt::format("threshold {} kW at {} is negative", values[i],
                                         format_timestamp(values.time_at(i))));
    }
  }
  DctSchedule out;
  out.thresholds = std::move(values);
  out.provenance = DctProvenance::user_supplied;
  return out;
}

DctSchedule read_dct_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty DCT file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp,dct_kw") {
    throw ParseError(fmt::format("bad header '{}', expected 'timestamp,dct_kw'", line));
  }
  std::vector<double> values;
  Timestamp start{};
  Timestamp prev{};
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError(fmt::format("line {}: expected 'timestamp,dct_kw'", line_no));
    }
    const Timestamp ts = parse_timestamp(std::string_view(line).substr(0, comma));
    double v = 0.0;
    try {
      std::size_t used = 0;
      const std::string field = line.substr(comma + 1);
      v = std::stod(field, &used);
      if (used != field.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(fmt::format("line {}: cannot parse dct_kw", line_no));
    }
    if (values.empty()) {
      start = ts;
    } else if (ts != prev.plus_minutes(kDefaultStepMinutes)) {
      throw CadenceError(fmt::format("line {}: DCT timestamps must advance by 15 minutes",
                                     line_no));
    }
    values.push_back(v);
    prev = ts;
  }
  if (values.empty()) throw ParseError("DCT file has no data rows");
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidThreshold("non-finite threshold in DCT file");
  }
  return user_dct(PowerSeries(start, kDefaultStepMinutes, std::move(values)));
}

DctSchedule load_dct_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open DCT file '{}'", path.string()));
  return read_dct_csv(in);
}

void write_dct_csv(const DctSchedule& dct, std::ostream& out) {
  out << "timestamp,dct_kw\n";
  for (std::size_t i = 0; i < dct.size(); ++i) {
    out << fmt::format("{},{}\n", format_timestamp(dct.thresholds.time_at(i)), dct[i]);
  }
}

void write_dct_csv(const DctSchedule& dct, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(fmt::format("cannot write '{}'", path.string()));
  write_dct_csv(dct, out);
}

}  // namespace bess
