#include "bess/forecast.hpp"

#include <cmath>

#include <fmt/format.h>

#include "bess/errors.hpp"

namespace bess {

void Forecast::validate() const {
  const auto t = static_cast<std::size_t>(horizon_steps);
  if (horizon_steps < 1 || load_kw.size() != t || pv_kw.size() != t) {
    throw InvalidArgument("forecast sequences must both hold horizon_steps entries");
  }
  for (std::size_t k = 0; k < t; ++k) {
    if (!std::isfinite(load_kw[k]) || !std::isfinite(pv_kw[k]) || load_kw[k] < 0.0 ||
        pv_kw[k] < 0.0) {
      throw InvalidArgument(fmt::format("forecast entry {} is negative or non-finite", k));
    }
  }
}

std::string_view to_string(ForecasterKind kind) {
  return kind == ForecasterKind::perfect ? "perfect" : "persistence";
}

ForecasterKind parse_forecaster(std::string_view name) {
  if (name == "perfect") return ForecasterKind::perfect;
  if (name == "persistence") return ForecasterKind::persistence;
  throw InvalidArgument(fmt::format("unknown forecaster '{}' (perfect, persistence)", name));
}

namespace {

void check_request(const ProfileSet& profiles, std::size_t now, int steps) {
  if (steps < 1) throw InvalidHorizon(fmt::format("forecast horizon {} < 1", steps));
  if (now >= profiles.size()) {
    throw InvalidArgument(
        fmt::format("forecast origin {} outside profile of {} samples", now, profiles.size()));
  }
}

}  // namespace

Forecast perfect_forecast(const ProfileSet& profiles, std::size_t now, int steps) {
  check_request(profiles, now, steps);
  Forecast f;
  f.horizon_steps = steps;
  f.load_kw.reserve(static_cast<std::size_t>(steps));
  f.pv_kw.reserve(static_cast<std::size_t>(steps));
  const std::size_t last = profiles.size() - 1;
  for (int k = 0; k < steps; ++k) {
    const std::size_t i = std::min(now + static_cast<std::size_t>(k), last);
    f.load_kw.push_back(profiles.load[i]);
    f.pv_kw.push_back(profiles.pv[i]);
  }
  return f;
}

Forecast persistence_forecast(const ProfileSet& profiles, std::size_t now, int steps) {
  check_request(profiles, now, steps);
  const auto per_day = static_cast<std::size_t>(profiles.load.steps_per_day());
  if (now < per_day) {
    throw InsufficientHistory(fmt::format(
        "persistence forecast at {} needs one full prior day",
        format_timestamp(profiles.load.time_at(now))));
  }
  Forecast f;
  f.horizon_steps = steps;
  f.load_kw.reserve(static_cast<std::size_t>(steps));
  f.pv_kw.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    // Step back whole days until the sample is in the past.
    const std::size_t ahead = static_cast<std::size_t>(k);
    const std::size_t i = now + ahead - per_day * (1 + ahead / per_day);
    f.load_kw.push_back(profiles.load[i]);
    f.pv_kw.push_back(profiles.pv[i]);
  }
  return f;
}

Forecast make_forecast(ForecasterKind kind, const ProfileSet& profiles, std::size_t now,
                       int steps) {
  return kind == ForecasterKind::perfect ? perfect_forecast(profiles, now, steps)
                                         : persistence_forecast(profiles, now, steps);
}

}  // namespace bess
