#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "bess/ingest.hpp"

namespace bess {

/// Load and PV estimates for the next `horizon_steps` intervals, starting
/// with the current one.
struct Forecast {
  std::vector<double> load_kw;
  std::vector<double> pv_kw;
  int horizon_steps = 0;

  /// Throws InvalidArgument on length mismatch, negative or non-finite values.
  void validate() const;
};

enum class ForecasterKind { perfect, persistence };

std::string_view to_string(ForecasterKind kind);
ForecasterKind parse_forecaster(std::string_view name);

/// True future values; past the end of data the last sample is repeated.
/// Throws InvalidHorizon when `steps` < 1.
Forecast perfect_forecast(const ProfileSet& profiles, std::size_t now, int steps);

/// Same clock times one day earlier. Throws InsufficientHistory before the
/// second day of data.
Forecast persistence_forecast(const ProfileSet& profiles, std::size_t now, int steps);

Forecast make_forecast(ForecasterKind kind, const ProfileSet& profiles, std::size_t now,
                       int steps);

}  // namespace bess
