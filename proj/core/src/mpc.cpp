#include "bess/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "bess/errors.hpp"

namespace bess {

namespace {

// Relative room on the optimal-face row of the tie-break pass.
constexpr double kTieBreakSlack = 1e-9;

}  // namespace

std::string_view to_string(SocReqMode mode) {
  return mode == SocReqMode::rolling_average ? "rolling_average" : "fixed";
}

SocReqMode parse_soc_req_mode(std::string_view name) {
  if (name == "rolling_average") return SocReqMode::rolling_average;
  if (name == "fixed") return SocReqMode::fixed;
  throw InvalidArgument(fmt::format("unknown soc_req_mode '{}' (rolling_average, fixed)", name));
}

std::string_view to_string(TieBreak mode) {
  return mode == TieBreak::none ? "none" : "max_soc";
}

TieBreak parse_tie_break(std::string_view name) {
  if (name == "none") return TieBreak::none;
  if (name == "max_soc") return TieBreak::max_soc;
  throw InvalidArgument(fmt::format("unknown tie_break '{}' (none, max_soc)", name));
}

void MpcConfig::validate() const {
  if (horizon_steps < 1) throw InvalidHorizon("MPC horizon_steps must be >= 1");
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !(c_tp >= 0.0)) {
    throw InvalidArgument("MPC weights alpha, beta, c_tp must be >= 0");
  }
  if (soc_req_mode == SocReqMode::fixed && !soc_req_fixed_kwh) {
    throw InvalidArgument("soc_req_mode 'fixed' requires soc_req_fixed_kwh");
  }
  if (soc_req_window_days < 1) throw InvalidArgument("soc_req_window_days must be >= 1");
}

double daily_shaving_requirement(std::span<const double> net_load_kw,
                                 std::span<const double> dct_kw, double step_hours) {
  if (net_load_kw.size() != dct_kw.size()) {
    throw DimensionMismatch("daily_shaving_requirement: length mismatch");
  }
  double run = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < net_load_kw.size(); ++i) {
    const double deficit = net_load_kw[i] - dct_kw[i];
    run = deficit > 0.0 ? run + deficit * step_hours : 0.0;
    worst = std::max(worst, run);
  }
  return worst;
}

SocReq soc_req(std::span<const double> daily_requirements_kwh, const MpcConfig& config,
               const BatterySpec& spec) {
  const auto clamp = [&](double v) { return std::clamp(v, spec.soc_min_kwh, spec.soc_max_kwh); };
  if (config.soc_req_mode == SocReqMode::fixed) {
    if (!config.soc_req_fixed_kwh) {
      throw InvalidArgument("soc_req_mode 'fixed' requires soc_req_fixed_kwh");
    }
    return {clamp(*config.soc_req_fixed_kwh), false};
  }
  if (daily_requirements_kwh.empty()) return {spec.soc_min_kwh, true};
  const auto window = std::min(daily_requirements_kwh.size(),
                               static_cast<std::size_t>(config.soc_req_window_days));
  const auto recent = daily_requirements_kwh.last(window);
  const double mean = std::accumulate(recent.begin(), recent.end(), 0.0) /
                      static_cast<double>(window);
  return {clamp(mean), false};
}

lp::LpProblem build_problem(const BatteryState& state, const Forecast& forecast,
                            std::span<const double> dct_kw, const BatterySpec& spec,
                            double soc_req_kwh, const MpcConfig& config, double step_hours) {
  config.validate();
  const int horizon = config.horizon_steps;
  const auto t_count = static_cast<std::size_t>(horizon);
  if (forecast.horizon_steps != horizon || forecast.load_kw.size() != t_count ||
      forecast.pv_kw.size() != t_count) {
    throw DimensionMismatch(fmt::format("forecast has {} steps, MPC horizon is {}",
                                        forecast.load_kw.size(), horizon));
  }
  if (dct_kw.size() != t_count) {
    throw DimensionMismatch(
        fmt::format("DCT slice has {} steps, MPC horizon is {}", dct_kw.size(), horizon));
  }

  const MpcLayout at{horizon};
  lp::LpProblem p(at.n_vars());
  const double soc0 = std::clamp(state.soc_kwh, spec.soc_min_kwh, spec.soc_max_kwh);
  const double eta = spec.charge_efficiency;

  // Objective: sum_t sell + c_tp (cha + dis) + alpha s_soc + beta s_dct
  for (int t = 0; t < horizon; ++t) {
    p.objective[at.sell(t)] = 1.0;
    p.objective[at.cha(t)] = config.c_tp;
    p.objective[at.dis(t)] = config.c_tp;
  }
  p.objective[at.soc_slack()] = config.alpha;
  p.objective[at.dct_slack()] = config.beta;

  // Bounds.
  for (int t = 0; t < horizon; ++t) {
    p.var_bounds[at.cha(t)] = {0.0, spec.p_max_kw};
    p.var_bounds[at.dis(t)] = {0.0, spec.p_max_kw};
    p.var_bounds[at.pur(t)] = {0.0, lp::kInfinity};
    p.var_bounds[at.sell(t)] = {0.0, lp::kInfinity};
  }
  const double slack_upper = config.hard_constraints ? 0.0 : lp::kInfinity;
  p.var_bounds[at.soc_slack()] = {0.0, slack_upper};
  p.var_bounds[at.dct_slack()] = {0.0, slack_upper};

  // Power balance: sell - pur - dis + cha = pv - load.
  for (int t = 0; t < horizon; ++t) {
    const auto k = static_cast<std::size_t>(t);
    std::vector<double> row(at.n_vars(), 0.0);
    row[at.sell(t)] = 1.0;
    row[at.pur(t)] = -1.0;
    row[at.dis(t)] = -1.0;
    row[at.cha(t)] = 1.0;
    p.add_eq(std::move(row), forecast.pv_kw[k] - forecast.load_kw[k]);
  }

  // SOC after step t is soc0 + dt * sum_{k<=t} (eta cha_k - dis_k).
  for (int t = 0; t < horizon; ++t) {
    std::vector<double> delta(at.n_vars(), 0.0);
    for (int k = 0; k <= t; ++k) {
      delta[at.cha(k)] = eta * step_hours;
      delta[at.dis(k)] = -step_hours;
    }
    std::vector<double> neg(delta);
    for (double& v : neg) v = -v;

    p.add_le(delta, spec.soc_max_kwh - soc0);         // SOC <= soc_max
    std::vector<double> req(neg);
    req[at.soc_slack()] = -1.0;
    p.add_le(std::move(req), soc0 - soc_req_kwh);     // SOC >= soc_req - s_soc
    p.add_le(std::move(neg), soc0 - spec.soc_min_kwh);  // SOC >= soc_min
  }

  // Purchase cap: pur - s_dct <= DCT.
  for (int t = 0; t < horizon; ++t) {
    std::vector<double> row(at.n_vars(), 0.0);
    row[at.pur(t)] = 1.0;
    row[at.dct_slack()] = -1.0;
    p.add_le(std::move(row), dct_kw[static_cast<std::size_t>(t)]);
  }
  return p;
}

MpcPlan plan(const BatteryState& state, const Forecast& forecast,
             std::span<const double> dct_kw, const BatterySpec& spec, double soc_req_kwh,
             const MpcConfig& config, double step_hours, std::ostream* lp_dump) {
  const lp::LpProblem problem =
      build_problem(state, forecast, dct_kw, spec, soc_req_kwh, config, step_hours);
  if (lp_dump != nullptr) lp::write_lp(problem, *lp_dump);

  const auto solve_or_throw = [](const lp::LpProblem& p) {
    try {
      return lp::solve(p);
    } catch (const NumericalBreakdown& e) {
      throw SolverFailure(fmt::format("MPC horizon LP: {}", e.what()));
    }
  };
  lp::LpSolution sol = solve_or_throw(problem);
  if (sol.status != lp::LpStatus::optimal) {
    throw SolverFailure(fmt::format("MPC horizon LP is {}", lp::to_string(sol.status)));
  }
  std::size_t iterations = sol.iterations;
  const double optimum = sol.objective_value;

  if (config.tie_break == TieBreak::max_soc) {
    // Restrict to the optimal face and maximize sum_t SOC(t).
    const MpcLayout at{config.horizon_steps};
    lp::LpProblem second = problem;
    second.add_le(problem.objective, optimum + kTieBreakSlack * (1.0 + std::abs(optimum)));
    std::fill(second.objective.begin(), second.objective.end(), 0.0);
    for (int t = 0; t < config.horizon_steps; ++t) {
      const double remaining = static_cast<double>(config.horizon_steps - t) * step_hours;
      second.objective[at.cha(t)] = -spec.charge_efficiency * remaining;
      second.objective[at.dis(t)] = remaining;
    }
    try {
      const lp::LpSolution refined = lp::solve(second);
      iterations += refined.iterations;
      if (refined.status == lp::LpStatus::optimal) {
        sol.x = refined.x;
        sol.objective_value = lp::evaluate_objective(problem, sol.x);
      }
    } catch (const NumericalBreakdown&) {
      // Keep the first-pass vertex; it is optimal already.
    }
  }

  const MpcLayout at{config.horizon_steps};
  const auto t_count = static_cast<std::size_t>(config.horizon_steps);
  MpcPlan out;
  out.p_cha_star.resize(t_count);
  out.p_dis_star.resize(t_count);
  out.p_pur.resize(t_count);
  out.p_sell.resize(t_count);
  out.soc_trajectory.resize(t_count + 1);
  out.soc_trajectory[0] = std::clamp(state.soc_kwh, spec.soc_min_kwh, spec.soc_max_kwh);
  for (int t = 0; t < config.horizon_steps; ++t) {
    const auto k = static_cast<std::size_t>(t);
    out.p_cha_star[k] = std::clamp(sol.x[at.cha(t)], 0.0, spec.p_max_kw);
    out.p_dis_star[k] = std::clamp(sol.x[at.dis(t)], 0.0, spec.p_max_kw);
    out.p_pur[k] = std::max(sol.x[at.pur(t)], 0.0);
    out.p_sell[k] = std::max(sol.x[at.sell(t)], 0.0);
    out.soc_trajectory[k + 1] =
        out.soc_trajectory[k] +
        (spec.charge_efficiency * out.p_cha_star[k] - out.p_dis_star[k]) * step_hours;
  }
  out.soc_slack_kwh = std::max(sol.x[at.soc_slack()], 0.0);
  out.dct_slack_kw = std::max(sol.x[at.dct_slack()], 0.0);
  out.objective_value = sol.objective_value;
  out.lp_iterations = iterations;
  return out;
}

void write_plan_csv(const MpcPlan& plan, Timestamp start, int step_minutes, std::ostream& out) {
  out << "timestamp,p_cha_kw,p_dis_kw,soc_kwh\n";
  for (std::size_t k = 0; k < plan.p_cha_star.size(); ++k) {
    out << fmt::format("{},{},{},{}\n",
                       format_timestamp(start.plus_minutes(static_cast<std::int64_t>(k) *
                                                           step_minutes)),
                       plan.p_cha_star[k], plan.p_dis_star[k], plan.soc_trajectory[k + 1]);
  }
}

}  // namespace bess
