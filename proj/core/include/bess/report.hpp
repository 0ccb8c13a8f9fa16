#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bess/config.hpp"
#include "bess/simulator.hpp"

namespace bess {

inline constexpr int kResultSchemaVersion = 1;

/// Deterministic summary document for one run: schema_version, the effective
/// configuration, metrics {pv_utilization, dc_saving, soc_avg, dc_cost_usd},
/// baseline, monthly bills and diagnostic counters. N/A metrics are null.
std::string result_json(const SimulationResult& result, const RunConfig& config,
                        const std::string& profile_label);

/// Same document with a `runs` array, one entry per labelled result.
struct LabelledResult {
  std::string label;
  const SimulationResult* result = nullptr;
  const RunConfig* config = nullptr;
};
std::string multi_result_json(const std::vector<LabelledResult>& runs,
                              const std::string& profile_label);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace bess
