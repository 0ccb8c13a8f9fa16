#include "bess/calendar.hpp"

#include <charconv>
#include <chrono>

#include <fmt/format.h>

#include "bess/errors.hpp"

namespace bess {

namespace {

namespace chr = std::chrono;

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  return a / b - ((a % b != 0) && ((a < 0) != (b < 0)));
}

bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

bool valid_civil(int y, int m, int d, int hh, int mm) {
  if (m < 1 || m > 12 || d < 1) return false;
  if (d > days_in_month(y, m)) return false;
  return hh >= 0 && hh < 24 && mm >= 0 && mm < 60;
}

}  // namespace

Timestamp make_timestamp(int year, int month, int day, int hour, int minute) {
  const chr::year_month_day ymd{chr::year{year}, chr::month{static_cast<unsigned>(month)},
                                chr::day{static_cast<unsigned>(day)}};
  const auto days = chr::sys_days{ymd}.time_since_epoch().count();
  return {static_cast<std::int64_t>(days) * kMinutesPerDay + hour * 60 + minute};
}

CivilTime to_civil(Timestamp t) {
  const std::int64_t days = floor_div(t.minutes, kMinutesPerDay);
  const auto mod = static_cast<int>(t.minutes - days * kMinutesPerDay);
  const chr::year_month_day ymd{chr::sys_days{chr::days{days}}};
  return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
          static_cast<int>(static_cast<unsigned>(ymd.day())), mod / 60, mod % 60};
}

int month_of(Timestamp t) { return to_civil(t).month; }
int year_of(Timestamp t) { return to_civil(t).year; }

int minute_of_day(Timestamp t) {
  return static_cast<int>(t.minutes - floor_div(t.minutes, kMinutesPerDay) * kMinutesPerDay);
}

int days_in_month(int year, int month) {
  const chr::year_month_day_last last{chr::year{year} / chr::month{static_cast<unsigned>(month)} /
                                      chr::last};
  return static_cast<int>(static_cast<unsigned>(last.day()));
}

Timestamp parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM
  int y = 0, m = 0, d = 0, hh = 0, mm = 0;
  const bool shape_ok = text.size() == 16 && text[4] == '-' && text[7] == '-' &&
                        text[10] == 'T' && text[13] == ':';
  if (!shape_ok || !parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d) || !parse_int(text.substr(11, 2), hh) ||
      !parse_int(text.substr(14, 2), mm) || !valid_civil(y, m, d, hh, mm)) {
    throw ParseError(fmt::format("invalid timestamp '{}', expected YYYY-MM-DDTHH:MM", text));
  }
  return make_timestamp(y, m, d, hh, mm);
}

Timestamp parse_date(std::string_view text) {
  int y = 0, m = 0, d = 0;
  const bool shape_ok = text.size() == 10 && text[4] == '-' && text[7] == '-';
  if (!shape_ok || !parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d) || !valid_civil(y, m, d, 0, 0)) {
    throw ParseError(fmt::format("invalid date '{}', expected YYYY-MM-DD", text));
  }
  return make_timestamp(y, m, d);
}

std::string format_timestamp(Timestamp t) {
  const CivilTime c = to_civil(t);
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}", c.year, c.month, c.day, c.hour,
                     c.minute);
}

std::string format_date(Timestamp t) {
  const CivilTime c = to_civil(t);
  return fmt::format("{:04d}-{:02d}-{:02d}", c.year, c.month, c.day);
}

}  // namespace bess
