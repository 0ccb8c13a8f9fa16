#include "bess/report.hpp"

#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "bess/errors.hpp"

namespace bess {

using nlohmann::ordered_json;

namespace {

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json bills_json(const std::vector<MonthlyBill>& bills) {
  ordered_json out = ordered_json::array();
  for (const auto& b : bills) {
    out.push_back({{"month", fmt::format("{:04}-{:02}", b.year, b.month)},
                   {"anytime_peak_kw", b.anytime_peak_kw},
                   {"partial_peak_kw", b.partial_peak_kw},
                   {"peak_peak_kw", b.peak_peak_kw},
                   {"dc_cost_usd", b.dc_cost_usd}});
  }
  return out;
}

ordered_json run_json(const SimulationResult& r, const RunConfig& config) {
  const Metrics& m = r.metrics;
  ordered_json run;
  run["controller"] = std::string(to_string(r.controller));
  run["config"] = ordered_json::parse(config_to_json(config));
  run["span"] = {{"start", format_timestamp(r.p_pur.start())},
                 {"end", format_timestamp(r.p_pur.end())},
                 {"intervals", r.p_pur.size()}};
  run["metrics"] = {{"pv_utilization", optional_number(m.pv_utilization)},
                    {"dc_saving", optional_number(m.dc_saving)},
                    {"soc_avg", m.soc_avg},
                    {"dc_cost_usd", m.dc_cost_usd},
                    {"total_sold_kwh", m.total_sold_kwh},
                    {"total_purchased_kwh", m.total_purchased_kwh}};
  run["baseline"] = {{"sold_kwh", r.baseline.sold_kwh},
                     {"purchased_kwh", r.baseline.purchased_kwh},
                     {"dc_cost_usd", r.baseline.dc_cost_usd}};
  run["monthly_bills"] = bills_json(r.monthly_bills);
  run["diagnostics"] = {{"max_balance_residual_kw", r.max_balance_residual_kw},
                        {"max_soc_violation_kwh", r.max_soc_violation_kwh},
                        {"forced_discharge", r.overrides.forced_discharge},
                        {"forced_charge", r.overrides.forced_charge},
                        {"dct_rescues", r.overrides.dct_rescues},
                        {"guideline_changed", r.overrides.guideline_changed},
                        {"discharge_changed", r.overrides.discharge_changed},
                        {"soc_req_fallback_days", r.soc_req_fallback_days},
                        {"mpc_solves", r.mpc_solves},
                        {"lp_iterations", r.lp_iterations},
                        {"plans_with_dct_slack", r.plans_with_dct_slack}};
  return run;
}

}  // namespace

std::string result_json(const SimulationResult& result, const RunConfig& config,
                        const std::string& profile_label) {
  ordered_json doc;
  doc["schema_version"] = kResultSchemaVersion;
  doc["profiles"] = profile_label;
  const ordered_json run = run_json(result, config);
  for (const auto& [k, v] : run.items()) doc[k] = v;
  return doc.dump(2) + "\n";
}

std::string multi_result_json(const std::vector<LabelledResult>& runs,
                              const std::string& profile_label) {
  ordered_json doc;
  doc["schema_version"] = kResultSchemaVersion;
  doc["profiles"] = profile_label;
  ordered_json arr = ordered_json::array();
  for (const auto& r : runs) {
    ordered_json entry;
    entry["label"] = r.label;
    const ordered_json run = run_json(*r.result, *r.config);
    for (const auto& [k, v] : run.items()) entry[k] = v;
    arr.push_back(std::move(entry));
  }
  doc["runs"] = std::move(arr);
  return doc.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw ParseError(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace bess
