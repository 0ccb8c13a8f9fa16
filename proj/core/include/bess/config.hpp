#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "bess/ingest.hpp"
#include "bess/simulator.hpp"
#include "bess/tariff.hpp"

namespace bess {

/// Everything a run file can specify. Keys mirror the SimulationConfig and
/// MpcConfig field names; unknown keys are rejected.
struct RunConfig {
  SimulationConfig simulation;
  TariffSchedule tariff = builtin_pge_tariff();
  /// Required when simulation.dct_source is `user`. Relative paths resolve
  /// against the config file's directory.
  std::optional<std::filesystem::path> dct_file;
  /// Optional synthetic profile source used when no profile CSV is given.
  std::optional<SyntheticProfileSpec> synthetic;
};

/// Throws ConfigError with the offending key on any schema problem.
RunConfig parse_config(std::string_view json_text,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON for a config (defaults filled in); parse_config accepts it.
std::string config_to_json(const RunConfig& config);

}  // namespace bess
