#include <algorithm>

#include "bess/controllers.hpp"

namespace bess {

RealtimeDecision realtime_decide(double net_load_kw, double dct_kw, const Dispatch& guideline,
                                 const BatteryState& state, const BatterySpec& spec,
                                 double step_hours) {
  const double charge_cap = std::min(spec.p_max_kw, headroom_kwh(state, spec) / step_hours);
  const double discharge_cap = std::min(spec.p_max_kw, available_kwh(state, spec) / step_hours);

  if (net_load_kw > dct_kw && available_kwh(state, spec) > 0.0) {
    return {{0.0, std::min(net_load_kw - dct_kw, discharge_cap)}, OverrideCase::forced_discharge};
  }
  if (net_load_kw < 0.0 && headroom_kwh(state, spec) > 0.0) {
    return {{std::min(-net_load_kw, charge_cap), 0.0}, OverrideCase::forced_charge};
  }
  const Dispatch passthrough{std::clamp(guideline.p_cha_kw, 0.0, charge_cap),
                             std::clamp(guideline.p_dis_kw, 0.0, discharge_cap)};
  return {passthrough, OverrideCase::none};
}

Dispatch realtime_dispatch(double net_load_kw, double dct_kw, const Dispatch& guideline,
                           const BatteryState& state, const BatterySpec& spec,
                           double step_hours) {
  return realtime_decide(net_load_kw, dct_kw, guideline, state, spec, step_hours).dispatch;
}

}  // namespace bess
