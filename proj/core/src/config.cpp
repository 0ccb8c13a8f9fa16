#include "bess/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "bess/errors.hpp"

namespace bess {

using nlohmann::json;

namespace {

// Rejects any key of `obj` outside `allowed`.
void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(fmt::format("'{}' must be an object", where));
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError(fmt::format("unknown key '{}{}'", where.empty() ? "" : fmt::format("{}.", where), key));
  }
}

double number(const json& obj, const char* key, std::string_view where) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(fmt::format("'{}.{}' must be a number", where, key));
  return v.get<double>();
}

std::string text(const json& obj, const char* key, std::string_view where) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(fmt::format("'{}.{}' must be a string", where, key));
  return v.get<std::string>();
}

int integer(const json& obj, const char* key, std::string_view where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(fmt::format("'{}.{}' must be an integer", where, key));
  return v.get<int>();
}

int parse_clock(std::string_view s) {
  int h = 0;
  int m = 0;
  if (s.size() != 5 || s[2] != ':' ||
      std::from_chars(s.data(), s.data() + 2, h).ec != std::errc{} ||
      std::from_chars(s.data() + 3, s.data() + 5, m).ec != std::errc{} || h < 0 || h > 24 ||
      m < 0 || m > 59 || (h == 24 && m != 0)) {
    throw ConfigError(fmt::format("bad clock time '{}' (HH:MM, 00:00..24:00)", s));
  }
  return h * 60 + m;
}

std::string format_clock(int minutes) { return fmt::format("{:02}:{:02}", minutes / 60, minutes % 60); }

BatterySpec parse_battery(const json& j) {
  check_keys(j, "battery", {"p_max_kw", "capacity_kwh", "soc_min_kwh", "soc_max_kwh", "charge_efficiency"});
  BatterySpec b = BatterySpec::full_range(number(j, "p_max_kw", "battery"),
                                          number(j, "capacity_kwh", "battery"));
  if (j.contains("soc_min_kwh")) b.soc_min_kwh = number(j, "soc_min_kwh", "battery");
  if (j.contains("soc_max_kwh")) b.soc_max_kwh = number(j, "soc_max_kwh", "battery");
  if (j.contains("charge_efficiency")) b.charge_efficiency = number(j, "charge_efficiency", "battery");
  return b;
}

MpcConfig parse_mpc(const json& j) {
  check_keys(j, "mpc", {"horizon_steps", "alpha", "beta", "c_tp", "soc_req_mode", "soc_req_fixed_kwh",
                        "soc_req_window_days", "hard_constraints", "tie_break"});
  MpcConfig m;
  if (j.contains("horizon_steps")) m.horizon_steps = integer(j, "horizon_steps", "mpc");
  if (j.contains("alpha")) m.alpha = number(j, "alpha", "mpc");
  if (j.contains("beta")) m.beta = number(j, "beta", "mpc");
  if (j.contains("c_tp")) m.c_tp = number(j, "c_tp", "mpc");
  if (j.contains("soc_req_mode")) m.soc_req_mode = parse_soc_req_mode(text(j, "soc_req_mode", "mpc"));
  if (j.contains("soc_req_fixed_kwh") && !j.at("soc_req_fixed_kwh").is_null()) {
    m.soc_req_fixed_kwh = number(j, "soc_req_fixed_kwh", "mpc");
  }
  if (j.contains("soc_req_window_days")) m.soc_req_window_days = integer(j, "soc_req_window_days", "mpc");
  if (j.contains("hard_constraints")) {
    if (!j.at("hard_constraints").is_boolean()) throw ConfigError("'mpc.hard_constraints' must be a boolean");
    m.hard_constraints = j.at("hard_constraints").get<bool>();
  }
  if (j.contains("tie_break")) m.tie_break = parse_tie_break(text(j, "tie_break", "mpc"));
  return m;
}

TariffSchedule parse_tariff(const json& j) {
  check_keys(j, "tariff", {"components"});
  if (!j.contains("components") || !j.at("components").is_array()) {
    throw ConfigError("'tariff.components' must be an array");
  }
  TariffSchedule t;
  for (const json& c : j.at("components")) {
    check_keys(c, "tariff.components[]", {"kind", "rate_usd_per_kw", "months", "windows"});
    DemandChargeComponent comp;
    comp.kind = parse_component_kind(text(c, "kind", "tariff.components[]"));
    comp.rate_usd_per_kw = number(c, "rate_usd_per_kw", "tariff.components[]");
    for (const json& m : c.at("months")) {
      const int month = m.get<int>();
      if (month < 1 || month > 12) throw ConfigError(fmt::format("bad tariff month {}", month));
      comp.months |= month_bit(month);
    }
    if (c.contains("windows")) {
      for (const json& w : c.at("windows")) {
        if (!w.is_array() || w.size() != 2) throw ConfigError("a tariff window is [\"HH:MM\", \"HH:MM\"]");
        comp.windows.push_back({parse_clock(w[0].get<std::string>()), parse_clock(w[1].get<std::string>())});
      }
    }
    t.components.push_back(std::move(comp));
  }
  try {
    t.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(fmt::format("tariff: {}", e.what()));
  }
  return t;
}

SyntheticProfileSpec parse_synthetic(const json& j) {
  check_keys(j, "synthetic", {"shape", "peak_load_kw", "pv_penetration", "days", "seed", "start"});
  SyntheticProfileSpec s;
  if (j.contains("shape")) s.shape = parse_load_shape(text(j, "shape", "synthetic"));
  if (j.contains("peak_load_kw")) s.peak_load_kw = number(j, "peak_load_kw", "synthetic");
  if (j.contains("pv_penetration")) s.pv_penetration = number(j, "pv_penetration", "synthetic");
  if (j.contains("days")) s.days = integer(j, "days", "synthetic");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("'synthetic.seed' must be a non-negative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("start")) s.start = parse_date(text(j, "start", "synthetic"));
  s.validate();
  return s;
}

DctSource parse_dct_source(std::string_view s) {
  if (s == "planned") return DctSource::planned;
  if (s == "user") return DctSource::user;
  throw ConfigError(fmt::format("unknown dct_source '{}' (planned, user)", s));
}

DctPlanMode parse_plan_mode(std::string_view s) {
  if (s == "same_month") return DctPlanMode::same_month;
  if (s == "previous_month") return DctPlanMode::previous_month;
  throw ConfigError(fmt::format("unknown dct_plan_mode '{}' (same_month, previous_month)", s));
}

RunConfig parse_root(const json& root, const std::filesystem::path& base_dir) {
  check_keys(root, "", {"controller", "battery", "mpc", "forecaster", "initial_soc_kwh", "dct_source",
                        "dct_plan_mode", "dct_file", "span", "tariff", "synthetic"});
  RunConfig out;
  SimulationConfig& sim = out.simulation;
  if (root.contains("controller")) sim.controller = parse_controller(text(root, "controller", "config"));
  if (root.contains("battery")) sim.battery = parse_battery(root.at("battery"));
  if (root.contains("mpc")) sim.mpc = parse_mpc(root.at("mpc"));
  if (root.contains("forecaster")) sim.forecaster = parse_forecaster(text(root, "forecaster", "config"));
  if (root.contains("initial_soc_kwh") && !root.at("initial_soc_kwh").is_null()) {
    sim.initial_soc_kwh = number(root, "initial_soc_kwh", "config");
  }
  if (root.contains("dct_source")) sim.dct_source = parse_dct_source(text(root, "dct_source", "config"));
  if (root.contains("dct_plan_mode")) sim.dct_plan_mode = parse_plan_mode(text(root, "dct_plan_mode", "config"));
  if (root.contains("dct_file") && !root.at("dct_file").is_null()) {
    std::filesystem::path p = text(root, "dct_file", "config");
    out.dct_file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  if (root.contains("span")) {
    const json& span = root.at("span");
    check_keys(span, "span", {"start", "end"});
    if (span.contains("start")) sim.span_start = parse_date(text(span, "start", "span"));
    if (span.contains("end")) sim.span_end = parse_date(text(span, "end", "span"));
  }
  if (root.contains("tariff")) out.tariff = parse_tariff(root.at("tariff"));
  if (root.contains("synthetic")) out.synthetic = parse_synthetic(root.at("synthetic"));
  if (sim.dct_source == DctSource::user && !out.dct_file) {
    throw ConfigError("dct_source 'user' requires 'dct_file'");
  }
  sim.validate();
  return out;
}

}  // namespace

RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  try {
    return parse_root(root, base_dir);
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  } catch (const Error& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::string config_to_json(const RunConfig& config) {
  const SimulationConfig& sim = config.simulation;
  json root;
  root["controller"] = std::string(to_string(sim.controller));
  root["battery"] = {{"p_max_kw", sim.battery.p_max_kw},
                     {"capacity_kwh", sim.battery.capacity_kwh},
                     {"soc_min_kwh", sim.battery.soc_min_kwh},
                     {"soc_max_kwh", sim.battery.soc_max_kwh},
                     {"charge_efficiency", sim.battery.charge_efficiency}};
  json mpc = {{"horizon_steps", sim.mpc.horizon_steps},
              {"alpha", sim.mpc.alpha},
              {"beta", sim.mpc.beta},
              {"c_tp", sim.mpc.c_tp},
              {"soc_req_mode", std::string(to_string(sim.mpc.soc_req_mode))},
              {"soc_req_window_days", sim.mpc.soc_req_window_days},
              {"hard_constraints", sim.mpc.hard_constraints},
              {"tie_break", std::string(to_string(sim.mpc.tie_break))}};
  mpc["soc_req_fixed_kwh"] = sim.mpc.soc_req_fixed_kwh ? json(*sim.mpc.soc_req_fixed_kwh) : json(nullptr);
  root["mpc"] = std::move(mpc);
  root["forecaster"] = std::string(to_string(sim.forecaster));
  root["initial_soc_kwh"] = sim.initial_soc();
  root["dct_source"] = sim.dct_source == DctSource::user ? "user" : "planned";
  root["dct_plan_mode"] = sim.dct_plan_mode == DctPlanMode::same_month ? "same_month" : "previous_month";
  if (config.dct_file) root["dct_file"] = config.dct_file->generic_string();
  if (sim.span_start || sim.span_end) {
    json span = json::object();
    if (sim.span_start) span["start"] = format_date(*sim.span_start);
    if (sim.span_end) span["end"] = format_date(*sim.span_end);
    root["span"] = std::move(span);
  }
  json comps = json::array();
  for (const auto& c : config.tariff.components) {
    json months = json::array();
    for (int m = 1; m <= 12; ++m) {
      if (c.applies_to(m)) months.push_back(m);
    }
    json windows = json::array();
    for (const auto& w : c.windows) windows.push_back({format_clock(w.start_min), format_clock(w.end_min)});
    comps.push_back({{"kind", std::string(to_string(c.kind))},
                     {"rate_usd_per_kw", c.rate_usd_per_kw},
                     {"months", months},
                     {"windows", windows}});
  }
  root["tariff"] = {{"components", comps}};
  if (config.synthetic) {
    const auto& s = *config.synthetic;
    root["synthetic"] = {{"shape", std::string(to_string(s.shape))},
                         {"peak_load_kw", s.peak_load_kw},
                         {"pv_penetration", s.pv_penetration},
                         {"days", s.days},
                         {"seed", s.seed},
                         {"start", format_date(s.start)}};
  }
  return root.dump(2);
}

}  // namespace bess
