// bess_lab: batch front end for the BESS simulation library.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bess/config.hpp"
#include "bess/dct_planner.hpp"
#include "bess/errors.hpp"
#include "bess/ingest.hpp"
#include "bess/report.hpp"
#include "bess/simulator.hpp"

namespace fs = std::filesystem;
using namespace bess;

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kSolver = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string config;
  std::string profiles;
  std::string synthetic;
  std::optional<int> days;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string controller;
  std::optional<int> horizon;
  std::string dct;
};

void add_source_flags(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config, "JSON run configuration");
  cmd->add_option("--profiles", a.profiles, "profile CSV (timestamp,load_kw,pv_kw)");
  cmd->add_option("--synthetic", a.synthetic, "synthetic load shape: grocery, hospital, theater");
  cmd->add_option("--days", a.days, "synthetic length in days");
  cmd->add_option("--seed", a.seed, "synthetic RNG seed");
}

RunConfig load_run_config(const CommonArgs& a) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : load_config(a.config);
  if (!a.controller.empty()) cfg.simulation.controller = parse_controller(a.controller);
  if (a.horizon) cfg.simulation.mpc.horizon_steps = *a.horizon;
  if (!a.dct.empty()) {
    cfg.simulation.dct_source = DctSource::user;
    cfg.dct_file = a.dct;
  }
  cfg.simulation.validate();
  return cfg;
}

struct Source {
  ProfileSet profiles;
  std::string label;
};

Source load_source(const CommonArgs& a, const RunConfig& cfg) {
  if (!a.profiles.empty() && !a.synthetic.empty()) {
    throw UsageError("--profiles and --synthetic are mutually exclusive");
  }
  if (!a.profiles.empty()) {
    if (a.days || a.seed) throw UsageError("--days/--seed only apply to --synthetic");
    ProfileSet p = load_csv(a.profiles);
    return {std::move(p), fs::path(a.profiles).filename().string()};
  }
  if (a.synthetic.empty() && !cfg.synthetic) {
    throw UsageError("no profile source: pass --profiles, --synthetic, or a config 'synthetic' block");
  }
  SyntheticProfileSpec spec = cfg.synthetic.value_or(SyntheticProfileSpec{});
  if (!a.synthetic.empty()) spec.shape = parse_load_shape(a.synthetic);
  if (a.days) spec.days = *a.days;
  if (a.seed) spec.seed = *a.seed;
  spec.validate();
  const std::string label =
      fmt::format("synthetic:{}:days={}:seed={}:peak={}:penetration={}", to_string(spec.shape),
                  spec.days, spec.seed, spec.peak_load_kw, spec.pv_penetration);
  return {generate_synthetic(spec), label};
}

DctSchedule resolve_dct(const ProfileSet& profiles, const RunConfig& cfg) {
  if (cfg.simulation.dct_source == DctSource::user) {
    DctSchedule d = load_dct_csv(*cfg.dct_file);
    if (!d.thresholds.aligned_with(profiles.load)) {
      throw InvalidArgument(fmt::format("DCT file '{}' does not cover the simulated span",
                                        cfg.dct_file->string()));
    }
    return d;
  }
  DctSchedule d = plan_dct(profiles, cfg.simulation.battery, cfg.tariff, cfg.simulation.dct_plan_mode);
  if (d.infeasible_warning) {
    std::cerr << "warning: the battery cannot lower some month's anytime peak; using max net load\n";
  }
  return d;
}

// The user DCT file may cover more than the span; slice it if so.
DctSchedule align_dct(const DctSchedule& full, const ProfileSet& span) {
  if (full.thresholds.aligned_with(span.load)) return full;
  const auto offset = span.load.start().minutes - full.thresholds.start().minutes;
  const int step = full.thresholds.step_minutes();
  if (offset < 0 || offset % step != 0 || step != span.load.step_minutes() ||
      static_cast<std::size_t>(offset / step) + span.size() > full.size()) {
    throw InvalidArgument("DCT schedule does not cover the simulated span");
  }
  DctSchedule out = full;
  out.thresholds = full.thresholds.slice(static_cast<std::size_t>(offset / step), span.size());
  return out;
}

fs::path prepare_out(const std::string& out) {
  if (out.empty()) throw UsageError("--out is required");
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ParseError(fmt::format("cannot create output directory '{}': {}", out, ec.message()));
  return dir;
}

unsigned thread_budget() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BESS_LAB_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) n = std::min(n, static_cast<unsigned>(v));
    } catch (const std::exception&) {
      throw UsageError(fmt::format("BESS_LAB_THREADS must be a positive integer, got '{}'", env));
    }
  }
  return n;
}

// Runs jobs[i]() for every i with at most `threads` in flight. Results are
// stored by index; the first exception is rethrown after all workers stop.
template <typename Job>
void run_parallel(std::vector<Job>& jobs, unsigned threads) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        jobs[i]();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------

int cmd_simulate(const CommonArgs& a, const std::string& lp_dump) {
  const RunConfig cfg = load_run_config(a);
  const Source src = load_source(a, cfg);
  const ProfileSet span = select_span(src.profiles, cfg.simulation);
  const DctSchedule dct = align_dct(resolve_dct(src.profiles, cfg), span);
  const fs::path dir = prepare_out(a.out);

  std::unique_ptr<std::ofstream> dump;
  SimulationHooks hooks;
  if (!lp_dump.empty()) {
    dump = std::make_unique<std::ofstream>(lp_dump);
    if (!*dump) throw ParseError(fmt::format("cannot write LP dump '{}'", lp_dump));
    hooks.lp_dump = dump.get();
  }
  const SimulationResult r = simulate(span, cfg.simulation, cfg.tariff, dct, hooks);
  write_text_file(dir / "result.json", result_json(r, cfg, src.label));
  std::ofstream traces(dir / "traces.csv", std::ios::binary);
  write_traces_csv(r, traces);

  const auto pct = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.2f}%", 100.0 * *v) : std::string("N/A");
  };
  std::cout << fmt::format("{} on {}: DC cost ${:.2f} (saving {}), SOC_avg {:.2f}%, PV-util {}\n",
                           to_string(r.controller), src.label, r.metrics.dc_cost_usd,
                           pct(r.metrics.dc_saving), r.metrics.soc_avg,
                           pct(r.metrics.pv_utilization));
  return kOk;
}

ComparisonRow row_for(const std::string& label, const SimulationResult& r) {
  return {label, r.metrics.dc_cost_usd, r.metrics.dc_saving, r.metrics.soc_avg,
          r.metrics.pv_utilization};
}

int cmd_compare(const CommonArgs& a) {
  const RunConfig cfg = load_run_config(a);
  const Source src = load_source(a, cfg);
  const ProfileSet span = select_span(src.profiles, cfg.simulation);
  const DctSchedule dct = align_dct(resolve_dct(src.profiles, cfg), span);
  const fs::path dir = prepare_out(a.out);

  RunConfig rule_cfg = cfg;
  rule_cfg.simulation.controller = ControllerKind::rule_based;
  RunConfig mpc_cfg = cfg;
  mpc_cfg.simulation.controller = ControllerKind::mpc;
  SimulationResult rule;
  SimulationResult mpc;
  std::vector<std::function<void()>> jobs{
      [&] { rule = simulate(span, rule_cfg.simulation, cfg.tariff, dct); },
      [&] { mpc = simulate(span, mpc_cfg.simulation, cfg.tariff, dct); }};
  run_parallel(jobs, thread_budget());

  ComparisonTable table;
  table.title = fmt::format("Yearly simulation results ({})", src.label);
  table.rows.push_back({"NoBESS", rule.baseline.dc_cost_usd, 0.0, std::nullopt, 0.0});
  if (!rule.baseline.sold_kwh) table.rows.back().pv_utilization.reset();
  if (!(rule.baseline.dc_cost_usd > 0.0)) table.rows.back().dc_saving.reset();
  table.rows.push_back(row_for("RuleBased", rule));
  table.rows.push_back(row_for("MPC", mpc));

  write_text_file(dir / "comparison.txt", render_text(table));
  write_text_file(dir / "comparison.csv", render_csv(table));
  write_text_file(dir / "result.json",
                  multi_result_json({{"RuleBased", &rule, &rule_cfg}, {"MPC", &mpc, &mpc_cfg}},
                                    src.label));
  std::cout << render_text(table);
  return kOk;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(fmt::format("bad {} '{}'", what, s));
  }
}

int cmd_sweep(const CommonArgs& a, const std::string& dimension, const std::string& points_arg) {
  const RunConfig cfg = load_run_config(a);
  if (dimension != "horizon" && dimension != "battery") {
    throw UsageError(fmt::format("unknown sweep dimension '{}' (horizon, battery)", dimension));
  }
  if (cfg.simulation.dct_source == DctSource::user && dimension == "battery") {
    throw UsageError("a battery sweep plans its own thresholds; drop the user DCT");
  }
  const Source src = load_source(a, cfg);
  const ProfileSet span = select_span(src.profiles, cfg.simulation);
  const fs::path dir = prepare_out(a.out);

  std::vector<std::string> labels;
  std::vector<RunConfig> point_cfgs;
  const std::string points = !points_arg.empty() ? points_arg
                             : dimension == "horizon" ? "12,16,20"
                                                      : "280/170,710/340,710/510";
  for (const auto& p : split(points, ',')) {
    RunConfig c = cfg;
    if (dimension == "horizon") {
      const double t = parse_number(p, "horizon");
      if (t < 1 || t != static_cast<int>(t)) throw UsageError(fmt::format("bad horizon '{}'", p));
      c.simulation.mpc.horizon_steps = static_cast<int>(t);
      labels.push_back(fmt::format("T={}", p));
    } else {
      const auto parts = split(p, '/');
      if (parts.size() != 2) throw UsageError(fmt::format("battery point '{}' is not kW/kWh", p));
      c.simulation.battery = BatterySpec::full_range(parse_number(parts[0], "power"),
                                                     parse_number(parts[1], "capacity"));
      c.simulation.initial_soc_kwh.reset();
      labels.push_back(fmt::format("{} kW/{} kWh", parts[0], parts[1]));
    }
    c.simulation.validate();
    point_cfgs.push_back(std::move(c));
  }
  if (point_cfgs.empty()) throw UsageError("empty sweep point list");

  // Thresholds depend on the battery only; horizon points share one schedule.
  std::vector<DctSchedule> dcts;
  if (dimension == "horizon") {
    dcts.assign(point_cfgs.size(), align_dct(resolve_dct(src.profiles, cfg), span));
  } else {
    for (const auto& c : point_cfgs) dcts.push_back(align_dct(resolve_dct(src.profiles, c), span));
  }

  const std::size_t n = point_cfgs.size();
  std::vector<RunConfig> rule_cfgs(point_cfgs);
  std::vector<RunConfig> mpc_cfgs(point_cfgs);
  std::vector<SimulationResult> rule(n);
  std::vector<SimulationResult> mpc(n);
  std::vector<std::function<void()>> jobs;
  for (std::size_t i = 0; i < n; ++i) {
    rule_cfgs[i].simulation.controller = ControllerKind::rule_based;
    mpc_cfgs[i].simulation.controller = ControllerKind::mpc;
    jobs.emplace_back([&, i] { mpc[i] = simulate(span, mpc_cfgs[i].simulation, cfg.tariff, dcts[i]); });
    jobs.emplace_back([&, i] { rule[i] = simulate(span, rule_cfgs[i].simulation, cfg.tariff, dcts[i]); });
  }
  run_parallel(jobs, thread_budget());

  SweepTable table;
  table.title = fmt::format("{} sweep ({})", dimension, src.label);
  std::vector<LabelledResult> runs;
  for (std::size_t i = 0; i < n; ++i) {
    table.rows.push_back({labels[i], rule[i].metrics.dc_saving, rule[i].metrics.pv_utilization,
                          mpc[i].metrics.dc_saving, mpc[i].metrics.pv_utilization});
    runs.push_back({labels[i] + " RuleBased", &rule[i], &rule_cfgs[i]});
    runs.push_back({labels[i] + " MPC", &mpc[i], &mpc_cfgs[i]});
  }
  write_text_file(dir / "sweep.txt", render_text(table));
  write_text_file(dir / "sweep.csv", render_csv(table));
  write_text_file(dir / "result.json", multi_result_json(runs, src.label));
  std::cout << render_text(table);
  return kOk;
}

int cmd_plan_dct(const CommonArgs& a) {
  const RunConfig cfg = load_run_config(a);
  const Source src = load_source(a, cfg);
  const ProfileSet span = select_span(src.profiles, cfg.simulation);
  if (a.out.empty()) throw UsageError("--out is required");
  const DctSchedule d =
      plan_dct(span, cfg.simulation.battery, cfg.tariff, cfg.simulation.dct_plan_mode);
  write_dct_csv(d, fs::path(a.out));
  for (const auto& c : d.components) {
    std::cout << fmt::format("{:04}-{:02} {:<12} {:.2f} kW\n", c.year, c.month, to_string(c.kind),
                             c.threshold_kw);
  }
  if (d.infeasible_warning) std::cerr << "warning: some month could not be shaved at all\n";
  return kOk;
}

int cmd_gen_profiles(const CommonArgs& a) {
  if (a.synthetic.empty()) throw UsageError("gen-profiles needs --synthetic <shape>");
  if (a.out.empty()) throw UsageError("--out is required");
  const RunConfig cfg = a.config.empty() ? RunConfig{} : load_config(a.config);
  const Source src = load_source(a, cfg);
  write_csv(src.profiles, fs::path(a.out));
  std::cout << fmt::format("wrote {} intervals ({}) to {}\n", src.profiles.size(), src.label, a.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bess_lab: behind-the-meter battery dispatch studies"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string lp_dump;
  std::string dimension = "horizon";
  std::string points;

  auto* sim = app.add_subcommand("simulate", "run one controller over a profile span");
  add_source_flags(sim, args);
  sim->add_option("--out", args.out, "output directory for result.json and traces.csv");
  sim->add_option("--controller", args.controller, "rule_based or mpc (overrides config)");
  sim->add_option("--horizon", args.horizon, "MPC horizon in intervals (overrides config)");
  sim->add_option("--dct", args.dct, "user DCT CSV (timestamp,dct_kw)");
  sim->add_option("--lp-dump", lp_dump, "write the first 96 MPC LPs to this file");

  auto* cmp = app.add_subcommand("compare", "no-battery, rule-based and MPC on shared profiles");
  add_source_flags(cmp, args);
  cmp->add_option("--out", args.out, "output directory");
  cmp->add_option("--horizon", args.horizon, "MPC horizon in intervals (overrides config)");
  cmp->add_option("--dct", args.dct, "user DCT CSV (timestamp,dct_kw)");

  auto* swp = app.add_subcommand("sweep", "horizon or battery-size sweep");
  add_source_flags(swp, args);
  swp->add_option("--out", args.out, "output directory");
  swp->add_option("--dimension", dimension, "horizon or battery")->capture_default_str();
  swp->add_option("--points", points,
                  "comma list: horizons (12,16,20) or batteries as kW/kWh (280/170,710/340)");
  swp->add_option("--dct", args.dct, "user DCT CSV for horizon sweeps");

  auto* pln = app.add_subcommand("plan-dct", "plan per-interval demand-charge thresholds");
  add_source_flags(pln, args);
  pln->add_option("--out", args.out, "DCT CSV to write");

  auto* gen = app.add_subcommand("gen-profiles", "write a synthetic profile CSV");
  gen->add_option("--config", args.config, "JSON config with a 'synthetic' block");
  gen->add_option("--synthetic", args.synthetic, "grocery, hospital, theater");
  gen->add_option("--days", args.days, "length in days");
  gen->add_option("--seed", args.seed, "RNG seed");
  gen->add_option("--out", args.out, "profile CSV to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(args, lp_dump);
    if (cmp->parsed()) return cmd_compare(args);
    if (swp->parsed()) return cmd_sweep(args, dimension, points);
    if (pln->parsed()) return cmd_plan_dct(args);
    if (gen->parsed()) return cmd_gen_profiles(args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const SolverFailure& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const NumericalBreakdown& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
