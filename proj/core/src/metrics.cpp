#include "bess/metrics.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "bess/errors.hpp"
#include "bess/simulator.hpp"

namespace bess {

double energy_kwh(const PowerSeries& power) {
  double sum = 0.0;
  for (double v : power.values()) sum += v;
  return sum * power.step_hours();
}

BaselineSummary no_bess_baseline(const ProfileSet& profiles, const TariffSchedule& tariff) {
  std::vector<double> pur(profiles.size());
  std::vector<double> sell(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const double net = profiles.net_load(i);
    pur[i] = net > 0.0 ? net : 0.0;
    sell[i] = net < 0.0 ? -net : 0.0;
  }
  const PowerSeries p_pur(profiles.load.start(), profiles.load.step_minutes(), std::move(pur));
  const PowerSeries p_sell(profiles.load.start(), profiles.load.step_minutes(), std::move(sell));
  BaselineSummary out;
  out.sold_kwh = energy_kwh(p_sell);
  out.purchased_kwh = energy_kwh(p_pur);
  out.bills = bill_by_month(p_pur, tariff);
  out.dc_cost_usd = total_cost(out.bills);
  return out;
}

std::optional<double> pv_utilization(double sold_with_bess_kwh, double baseline_sold_kwh) {
  if (baseline_sold_kwh <= 0.0) return std::nullopt;
  return 1.0 - sold_with_bess_kwh / baseline_sold_kwh;
}

std::optional<double> pv_utilization(const SimulationResult& with_bess, double baseline_sold_kwh) {
  return pv_utilization(energy_kwh(with_bess.p_sell), baseline_sold_kwh);
}

double dc_saving(double bess_cost_usd, double no_bess_cost_usd) {
  if (!(no_bess_cost_usd > 0.0)) {
    throw ZeroBaseline("demand-charge saving is undefined for a zero-cost baseline");
  }
  return (no_bess_cost_usd - bess_cost_usd) / no_bess_cost_usd;
}

double soc_avg(std::span<const double> soc_kwh, double capacity_kwh) {
  if (soc_kwh.empty()) throw InvalidArgument("soc_avg of an empty trace");
  if (capacity_kwh <= 0.0) return 0.0;
  const double mean =
      std::accumulate(soc_kwh.begin(), soc_kwh.end(), 0.0) / static_cast<double>(soc_kwh.size());
  return 100.0 * mean / capacity_kwh;
}

double soc_avg(const SimulationResult& result, const BatterySpec& spec) {
  return soc_avg(result.soc.values(), spec.capacity_kwh);
}

// ---------------------------------------------------------------------------

namespace {

std::string pct(const std::optional<double>& v) {
  return v ? fmt::format("{:.2f}", 100.0 * *v) : "N/A";
}
std::string plain(const std::optional<double>& v) {
  return v ? fmt::format("{:.2f}", *v) : "N/A";
}
std::string csv_num(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : ""; }

std::string render_grid(const std::string& title, const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::string out = title.empty() ? "" : title + "\n";
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == 0) {
        out += fmt::format("{:<{}}", cells[c], width[c]);
      } else {
        out += fmt::format("  {:>{}}", cells[c], width[c]);
      }
    }
    out += '\n';
  };
  line(header);
  std::size_t total = 0;
  for (auto w : width) total += w + 2;
  out += std::string(total - 2, '-') + '\n';
  for (const auto& r : rows) line(r);
  return out;
}

}  // namespace

std::string render_text(const ComparisonTable& table) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : table.rows) {
    rows.push_back({r.label, fmt::format("{:.2f}", r.dc_cost_usd), pct(r.dc_saving),
                    plain(r.soc_avg), pct(r.pv_utilization)});
  }
  return render_grid(table.title,
                     {"Controller", "DC Cost ($)", "DC Saving (%)", "SOC_avg", "PV-util. (%)"},
                     rows);
}

std::string render_csv(const ComparisonTable& table) {
  std::string out = "controller,dc_cost_usd,dc_saving,soc_avg,pv_utilization\n";
  for (const auto& r : table.rows) {
    out += fmt::format("{},{},{},{},{}\n", r.label, r.dc_cost_usd, csv_num(r.dc_saving),
                       csv_num(r.soc_avg), csv_num(r.pv_utilization));
  }
  return out;
}

std::string render_text(const SweepTable& table) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : table.rows) {
    rows.push_back({r.point, pct(r.rule_dc_saving), pct(r.rule_pv_utilization),
                    pct(r.mpc_dc_saving), pct(r.mpc_pv_utilization)});
  }
  return render_grid(table.title,
                     {"Point", "Rule DC Saving (%)", "Rule PV-util. (%)", "MPC DC Saving (%)",
                      "MPC PV-util. (%)"},
                     rows);
}

std::string render_csv(const SweepTable& table) {
  std::string out =
      "point,rule_dc_saving,rule_pv_utilization,mpc_dc_saving,mpc_pv_utilization\n";
  for (const auto& r : table.rows) {
    out += fmt::format("{},{},{},{},{}\n", r.point, csv_num(r.rule_dc_saving),
                       csv_num(r.rule_pv_utilization), csv_num(r.mpc_dc_saving),
                       csv_num(r.mpc_pv_utilization));
  }
  return out;
}

}  // namespace bess
