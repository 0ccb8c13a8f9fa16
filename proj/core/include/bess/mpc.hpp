#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bess/domain.hpp"
#include "bess/forecast.hpp"
#include "bess/lp.hpp"

namespace bess {

enum class SocReqMode { rolling_average, fixed };

std::string_view to_string(SocReqMode mode);
SocReqMode parse_soc_req_mode(std::string_view name);

/// How plan() picks among several optimal solutions of the horizon LP.
enum class TieBreak {
  /// Whatever vertex the simplex lands on.
  none,
  /// Second pass over the optimal face maximizing the summed SOC trajectory:
  /// charge as early and discharge as late as the optimum allows.
  max_soc,
};

std::string_view to_string(TieBreak mode);
TieBreak parse_tie_break(std::string_view name);

struct MpcConfig {
  int horizon_steps = 16;
  /// Weight on the SOC_req shortfall slack.
  double alpha = 10.0;
  /// Weight on the DCT exceedance slack.
  double beta = 100.0;
  /// Throughput cost per kW of charge or discharge per step.
  double c_tp = 0.05;
  SocReqMode soc_req_mode = SocReqMode::rolling_average;
  std::optional<double> soc_req_fixed_kwh;
  int soc_req_window_days = 7;
  /// Pins both slacks to zero (the hard-constrained formulation). Testing only.
  bool hard_constraints = false;
  TieBreak tie_break = TieBreak::max_soc;

  void validate() const;
};

/// Column layout of the horizon LP: four blocks of T (charge, discharge,
/// purchase, sale) followed by the SOC and DCT slacks.
struct MpcLayout {
  int horizon = 0;

  std::size_t n_vars() const { return 4 * static_cast<std::size_t>(horizon) + 2; }
  std::size_t cha(int t) const { return static_cast<std::size_t>(t); }
  std::size_t dis(int t) const { return static_cast<std::size_t>(horizon + t); }
  std::size_t pur(int t) const { return static_cast<std::size_t>(2 * horizon + t); }
  std::size_t sell(int t) const { return static_cast<std::size_t>(3 * horizon + t); }
  std::size_t soc_slack() const { return 4 * static_cast<std::size_t>(horizon); }
  std::size_t dct_slack() const { return 4 * static_cast<std::size_t>(horizon) + 1; }
};

struct MpcPlan {
  std::vector<double> p_cha_star;
  std::vector<double> p_dis_star;
  std::vector<double> p_pur;
  std::vector<double> p_sell;
  /// SOC at the start of the horizon followed by the SOC after each step.
  std::vector<double> soc_trajectory;
  double soc_slack_kwh = 0.0;
  double dct_slack_kw = 0.0;
  /// Objective value of the returned plan.
  double objective_value = 0.0;
  /// Simplex pivots over both passes.
  std::size_t lp_iterations = 0;

  Dispatch first_step() const { return {p_cha_star.front(), p_dis_star.front()}; }
};

/// Battery energy a day needed to stay under its thresholds: the largest
/// deficit max(net - dct, 0) * dt accumulated over one contiguous run of
/// exceeding intervals. Runs are separated by any interval at or below DCT.
double daily_shaving_requirement(std::span<const double> net_load_kw,
                                 std::span<const double> dct_kw, double step_hours);

struct SocReq {
  double kwh = 0.0;
  /// Rolling mode had no prior day and fell back to soc_min.
  bool fallback = false;
};

/// Soft lower SOC target. Rolling mode averages the last
/// `soc_req_window_days` entries of `daily_requirements_kwh` (oldest first);
/// the result is clamped to [soc_min, soc_max].
SocReq soc_req(std::span<const double> daily_requirements_kwh, const MpcConfig& config,
               const BatterySpec& spec);

/// Encodes the soft-constrained horizon problem. Throws DimensionMismatch if
/// the forecast or threshold slice does not hold `horizon_steps` entries.
lp::LpProblem build_problem(const BatteryState& state, const Forecast& forecast,
                            std::span<const double> dct_kw, const BatterySpec& spec,
                            double soc_req_kwh, const MpcConfig& config, double step_hours);

/// Solves the horizon problem and maps the LP solution back to a plan.
/// Throws SolverFailure if the LP is not optimal (only possible with
/// `hard_constraints`, or on numerical breakdown).
MpcPlan plan(const BatteryState& state, const Forecast& forecast,
             std::span<const double> dct_kw, const BatterySpec& spec, double soc_req_kwh,
             const MpcConfig& config, double step_hours, std::ostream* lp_dump = nullptr);

/// `timestamp,p_cha_kw,p_dis_kw,soc_kwh`; soc_kwh is the SOC after each step.
void write_plan_csv(const MpcPlan& plan, Timestamp start, int step_minutes, std::ostream& out);

}  // namespace bess
