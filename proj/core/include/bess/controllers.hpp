#pragma once

#include "bess/domain.hpp"

namespace bess {

/// Conventional DCT-tracking baseline.
///
/// Guards are evaluated on pre-battery grid power `net_load = load - pv`.
/// Below the threshold with headroom left, charge toward the threshold;
/// above it with energy left, discharge the excess; otherwise idle. Both
/// actions are capped by p_max and by what fits in the SOC range this step.
Dispatch rule_dispatch(double net_load_kw, double dct_kw, const BatteryState& state,
                       const BatterySpec& spec, double step_hours);

enum class OverrideCase { none, forced_discharge, forced_charge };

struct RealtimeDecision {
  Dispatch dispatch;
  OverrideCase applied = OverrideCase::none;
};

/// Executes an MPC guideline against measured net load.
///
/// Case 1 (net_load > dct, energy left): discharge the full deficit.
/// Case 2 (net_load < 0, headroom left): charge the full surplus.
/// Otherwise the guideline passes through, with charge capped by headroom
/// and discharge by available energy. Overrides also respect p_max.
RealtimeDecision realtime_decide(double net_load_kw, double dct_kw, const Dispatch& guideline,
                                 const BatteryState& state, const BatterySpec& spec,
                                 double step_hours);

Dispatch realtime_dispatch(double net_load_kw, double dct_kw, const Dispatch& guideline,
                           const BatteryState& state, const BatterySpec& spec,
                           double step_hours);

}  // namespace bess
