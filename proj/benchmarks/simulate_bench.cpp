#include <benchmark/benchmark.h>

#include "bess/simulator.hpp"

namespace {

// One synthetic grocery month through the full closed loop.
void BM_SimulateMonth(benchmark::State& state) {
  bess::SyntheticProfileSpec spec;
  spec.days = 31;
  spec.start = bess::make_timestamp(2023, 7, 1);
  const auto profiles = bess::generate_synthetic(spec);
  const auto tariff = bess::builtin_pge_tariff();
  bess::SimulationConfig config;
  config.controller = state.range(0) == 0 ? bess::ControllerKind::rule_based : bess::ControllerKind::mpc;
  const auto dct = bess::plan_dct(profiles, config.battery, tariff);
  for (auto _ : state) benchmark::DoNotOptimize(bess::simulate(profiles, config, tariff, dct));
  state.SetLabel(config.controller == bess::ControllerKind::mpc ? "mpc" : "rule_based");
}

}  // namespace

BENCHMARK(BM_SimulateMonth)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
