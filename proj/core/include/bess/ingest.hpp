#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "bess/domain.hpp"

namespace bess {

/// Load and PV traces sharing one calendar.
struct ProfileSet {
  PowerSeries load;
  PowerSeries pv;
  std::string label;

  /// Throws InvalidArgument if the traces are misaligned, NegativePower if
  /// either carries a negative sample.
  void validate() const;

  std::size_t size() const { return load.size(); }
  double net_load(std::size_t i) const { return load[i] - pv[i]; }
  ProfileSet slice(std::size_t first, std::size_t count) const;
};

enum class LoadShape { grocery, hospital, theater };

std::string_view to_string(LoadShape shape);
/// Throws InvalidSpec on an unknown name.
LoadShape parse_load_shape(std::string_view name);

struct SyntheticProfileSpec {
  LoadShape shape = LoadShape::grocery;
  double peak_load_kw = 420.0;
  /// Peak PV over peak load.
  double pv_penetration = 0.9;
  int days = 365;
  std::uint64_t seed = 1;
  /// Non-leap year, January 1.
  Timestamp start = make_timestamp(2023, 1, 1);
  int step_minutes = kDefaultStepMinutes;

  void validate() const;
};

/// Reads a `timestamp,load_kw,pv_kw` file with strictly uniform cadence.
ProfileSet load_csv(const std::filesystem::path& path);
ProfileSet read_csv(std::istream& in, std::string label = "profiles");

void write_csv(const ProfileSet& profiles, std::ostream& out);
void write_csv(const ProfileSet& profiles, const std::filesystem::path& path);

/// Paper-shaped synthetic load and PV. Deterministic for a given spec.
ProfileSet generate_synthetic(const SyntheticProfileSpec& spec);

}  // namespace bess
