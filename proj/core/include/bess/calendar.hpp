#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace bess {

inline constexpr int kMinutesPerDay = 1440;

/// Timezone-naive local wall-clock time at minute resolution.
struct Timestamp {
  std::int64_t minutes = 0;  // since 1970-01-01T00:00

  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;

  constexpr Timestamp plus_minutes(std::int64_t m) const { return {minutes + m}; }
};

struct CivilTime {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 0;
  int minute = 0;

  friend constexpr bool operator==(const CivilTime&, const CivilTime&) = default;
};

Timestamp make_timestamp(int year, int month, int day, int hour = 0, int minute = 0);
CivilTime to_civil(Timestamp t);

/// Calendar month 1..12.
int month_of(Timestamp t);
int year_of(Timestamp t);
int minute_of_day(Timestamp t);
int days_in_month(int year, int month);

/// Parses `YYYY-MM-DDTHH:MM`; throws ParseError.
Timestamp parse_timestamp(std::string_view text);
/// Parses `YYYY-MM-DD` as midnight; throws ParseError.
Timestamp parse_date(std::string_view text);
std::string format_timestamp(Timestamp t);
std::string format_date(Timestamp t);

}  // namespace bess
