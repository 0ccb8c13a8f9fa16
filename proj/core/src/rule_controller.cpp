#include <algorithm>

#include "bess/controllers.hpp"

namespace bess {

Dispatch rule_dispatch(double net_load_kw, double dct_kw, const BatteryState& state,
                       const BatterySpec& spec, double step_hours) {
  const double headroom = headroom_kwh(state, spec);
  const double available = available_kwh(state, spec);
  if (net_load_kw <= dct_kw && headroom > 0.0) {
    return {std::min({dct_kw - net_load_kw, spec.p_max_kw, headroom / step_hours}), 0.0};
  }
  if (net_load_kw > dct_kw && available > 0.0) {
    return {0.0, std::min({net_load_kw - dct_kw, spec.p_max_kw, available / step_hours})};
  }
  return {};
}

}  // namespace bess
