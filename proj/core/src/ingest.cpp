#include "bess/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "bess/errors.hpp"

namespace bess {

void ProfileSet::validate() const {
  if (!load.aligned_with(pv)) {
    throw InvalidArgument(fmt::format("profile set '{}': load and pv are not aligned", label));
  }
  load.require_non_negative("load_kw");
  pv.require_non_negative("pv_kw");
}

ProfileSet ProfileSet::slice(std::size_t first, std::size_t count) const {
  return {load.slice(first, count), pv.slice(first, count), label};
}

std::string_view to_string(LoadShape shape) {
  switch (shape) {
    case LoadShape::grocery: return "grocery";
    case LoadShape::hospital: return "hospital";
    case LoadShape::theater: return "theater";
  }
  return "unknown";
}

LoadShape parse_load_shape(std::string_view name) {
  if (name == "grocery") return LoadShape::grocery;
  if (name == "hospital") return LoadShape::hospital;
  if (name == "theater") return LoadShape::theater;
  throw InvalidSpec(fmt::format("unknown load shape '{}' (grocery, hospital, theater)", name));
}

void SyntheticProfileSpec::validate() const {
  if (!(peak_load_kw > 0.0) || !std::isfinite(peak_load_kw)) {
    throw InvalidSpec("peak_load_kw must be positive");
  }
  if (!(pv_penetration >= 0.0 && pv_penetration <= 1.5)) {
    throw InvalidSpec("pv_penetration must lie in [0, 1.5]");
  }
  if (days < 1) throw InvalidSpec("days must be at least 1");
  if (step_minutes <= 0 || kMinutesPerDay % step_minutes != 0) {
    throw InvalidSpec("step_minutes must divide 1440");
  }
  if (minute_of_day(start) != 0) throw InvalidSpec("synthetic profiles start at midnight");
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_number(std::string_view field, std::size_t line_no, std::string_view column) {
  field = trim(field);
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw ParseError(
        fmt::format("line {}: cannot parse {} value '{}'", line_no, column, field));
  }
  return v;
}

}  // namespace

ProfileSet read_csv(std::istream& in, std::string label) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty profile file");
  if (trim(line) != "timestamp,load_kw,pv_kw") {
    throw ParseError(
        fmt::format("bad header '{}', expected 'timestamp,load_kw,pv_kw'", trim(line)));
  }

  std::vector<double> load;
  std::vector<double> pv;
  Timestamp start{};
  Timestamp prev{};
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto c1 = row.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos ||
        row.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError(fmt::format("line {}: expected 3 comma-separated fields", line_no));
    }
    Timestamp ts{};
    try {
      ts = parse_timestamp(trim(row.substr(0, c1)));
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("line {}: {}", line_no, e.what()));
    }
    const double l = parse_number(row.substr(c1 + 1, c2 - c1 - 1), line_no, "load_kw");
    const double p = parse_number(row.substr(c2 + 1), line_no, "pv_kw");

    if (load.empty()) {
      start = ts;
    } else {
      const Timestamp expected = prev.plus_minutes(kDefaultStepMinutes);
      if (ts > expected) {
        throw CadenceError(fmt::format("line {}: gap in data, missing interval at {}", line_no,
                                       format_timestamp(expected)));
      }
      if (ts < expected) {
        throw CadenceError(fmt::format("line {}: timestamp {} breaks the 15-minute cadence",
                                       line_no, format_timestamp(ts)));
      }
    }
    if (l < 0.0) {
      throw NegativePower(fmt::format("line {}: load_kw is negative ({})", line_no, l));
    }
    if (p < 0.0) throw NegativePower(fmt::format("line {}: pv_kw is negative ({})", line_no, p));
    load.push_back(l);
    pv.push_back(p);
    prev = ts;
  }
  if (load.empty()) throw ParseError("profile file has no data rows");

  ProfileSet out{PowerSeries(start, kDefaultStepMinutes, std::move(load)),
                 PowerSeries(start, kDefaultStepMinutes, std::move(pv)), std::move(label)};
  out.validate();
  return out;
}

ProfileSet load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open profile file '{}'", path.string()));
  return read_csv(in, path.stem().string());
}

void write_csv(const ProfileSet& profiles, std::ostream& out) {
  out << "timestamp,load_kw,pv_kw\n";
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    out << fmt::format("{},{},{}\n", format_timestamp(profiles.load.time_at(i)),
                       profiles.load[i], profiles.pv[i]);
  }
}

void write_csv(const ProfileSet& profiles, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(fmt::format("cannot write '{}'", path.string()));
  write_csv(profiles, out);
}

// ---------------------------------------------------------------------------
// Synthetic profiles

namespace {

// Uniform [0,1) from the raw 64-bit stream. Standard distributions are not
// bit-reproducible across library implementations.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double between(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

 private:
  std::mt19937_64 rng_;
};

struct Anchor {
  double hour;
  double level;
};

// Hour-of-day anchor points, linearly interpolated. Levels are relative;
// the whole trace is rescaled to the requested peak afterwards.
constexpr std::array kGroceryDay{
    Anchor{0, 0.45},    Anchor{5, 0.42},    Anchor{8, 0.46},  Anchor{9, 0.66},
    Anchor{11, 0.74},   Anchor{15.5, 0.74}, Anchor{17, 0.86}, Anchor{18.5, 0.92},
    Anchor{20, 0.78},   Anchor{22, 0.52},   Anchor{24, 0.45}};

constexpr std::array kHospitalDay{
    Anchor{0, 0.60},  Anchor{6, 0.60},  Anchor{8, 0.72},  Anchor{10, 0.80},
    Anchor{12, 0.82}, Anchor{14, 0.84}, Anchor{16, 0.90}, Anchor{17.5, 0.94},
    Anchor{19, 0.86}, Anchor{21, 0.70}, Anchor{24, 0.60}};

constexpr std::array kTheaterDay{
    Anchor{0, 0.72},  Anchor{2, 0.46},  Anchor{6, 0.30},  Anchor{10, 0.32},
    Anchor{14, 0.38}, Anchor{17, 0.55}, Anchor{19, 0.86}, Anchor{21, 1.00},
    Anchor{23, 0.94}, Anchor{24, 0.72}};

template <std::size_t N>
double interpolate(const std::array<Anchor, N>& day, double hour) {
  for (std::size_t k = 1; k < N; ++k) {
    if (hour <= day[k].hour) {
      const double w = (hour - day[k - 1].hour) / (day[k].hour - day[k - 1].hour);
      return day[k - 1].level + w * (day[k].level - day[k - 1].level);
    }
  }
  return day[N - 1].level;
}

double shape_level(LoadShape shape, double hour) {
  switch (shape) {
    case LoadShape::grocery: return interpolate(kGroceryDay, hour);
    case LoadShape::hospital: return interpolate(kHospitalDay, hour);
    case LoadShape::theater: return interpolate(kTheaterDay, hour);
  }
  return 0.0;
}

struct ShapeNoise {
  double day_lo;      // daily scale factor range
  double day_hi;
  double jitter;      // per-interval multiplicative noise amplitude
};

ShapeNoise noise_for(LoadShape shape) {
  switch (shape) {
    case LoadShape::grocery: return {0.94, 1.03, 0.03};
    case LoadShape::hospital: return {0.94, 1.00, 0.02};
    case LoadShape::theater: return {0.85, 1.00, 0.03};
  }
  return {1.0, 1.0, 0.0};
}

int day_of_year(Timestamp day_start) {
  const CivilTime c = to_civil(day_start);
  return static_cast<int>((day_start.minutes - make_timestamp(c.year, 1, 1).minutes) /
                          kMinutesPerDay);
}

// Weekday with 0 = Monday.
int weekday(Timestamp day_start) {
  const std::int64_t days = day_start.minutes / kMinutesPerDay;  // 1970-01-01 was a Thursday
  return static_cast<int>(((days % 7) + 7 + 3) % 7);
}

void rescale_to_peak(std::vector<double>& v, double target) {
  const double peak = *std::max_element(v.begin(), v.end());
  if (peak <= 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  const double k = target / peak;
  for (double& x : v) x *= k;
}

}  // namespace

ProfileSet generate_synthetic(const SyntheticProfileSpec& spec) {
  spec.validate();
  const int per_day = kMinutesPerDay / spec.step_minutes;
  const auto n = static_cast<std::size_t>(spec.days) * static_cast<std::size_t>(per_day);
  std::vector<double> load(n, 0.0);
  std::vector<double> pv(n, 0.0);

  // Separate streams so toggling PV does not perturb the load trace.
  Uniform load_rng(spec.seed * 0x9E3779B97F4A7C15ULL + 1);
  Uniform pv_rng(spec.seed * 0xC2B2AE3D27D4EB4FULL + 2);
  const ShapeNoise noise = noise_for(spec.shape);
  constexpr double two_pi = 2.0 * std::numbers::pi;

  for (int d = 0; d < spec.days; ++d) {
    const Timestamp day_start =
        spec.start.plus_minutes(static_cast<std::int64_t>(d) * kMinutesPerDay);
    const int doy = day_of_year(day_start);
    const double season = std::cos(two_pi * (doy - 172) / 365.0);  // +1 at the June solstice

    // Load: shape x daily factor x cooling season x jitter.
    double day_factor = load_rng.between(noise.day_lo, noise.day_hi);
    if (spec.shape == LoadShape::theater) {
      const int wd = weekday(day_start);
      if (wd == 4 || wd == 5) day_factor = load_rng.between(0.98, 1.02);
    }
    const double cooling = 1.0 + 0.08 * std::cos(two_pi * (doy - 200) / 365.0);

    // PV: bell between sunrise and sunset, amplitude set by season and weather.
    const double day_length = 12.0 + 2.0 * season;  // hours
    const double sunrise = 13.0 - day_length / 2.0;
    const double sunset = 13.0 + day_length / 2.0;
    const double amplitude = 0.72 + 0.28 * season;
    const double weather = pv_rng();
    double clearness = 0.0;
    double cloud_jitter = 0.0;
    // Dry summers: clear skies dominate around the solstice.
    const double p_sunny = 0.55 + 0.35 * std::max(0.0, season);
    if (weather < p_sunny) {
      clearness = pv_rng.between(0.92, 1.0);
      cloud_jitter = 0.03;
    } else {
      clearness = pv_rng.between(0.6, 0.9);
      cloud_jitter = 0.25;
    }

    for (int k = 0; k < per_day; ++k) {
      const auto i = static_cast<std::size_t>(d) * per_day + static_cast<std::size_t>(k);
      const double hour = k * spec.step_minutes / 60.0;
      const double jitter = 1.0 + noise.jitter * (2.0 * load_rng() - 1.0);
      load[i] = shape_level(spec.shape, hour) * day_factor * cooling * jitter;

      const double mid = hour + spec.step_minutes / 120.0;
      const double cloud = 1.0 - cloud_jitter * pv_rng();
      if (mid > sunrise && mid < sunset) {
        const double x = (mid - sunrise) / (sunset - sunrise);
        pv[i] = std::pow(std::sin(std::numbers::pi * x), 1.3) * amplitude * clearness * cloud;
      }
    }
  }

  rescale_to_peak(load, spec.peak_load_kw);
  rescale_to_peak(pv, spec.pv_penetration * spec.peak_load_kw);

  ProfileSet out{PowerSeries(spec.start, spec.step_minutes, std::move(load)),
                 PowerSeries(spec.start, spec.step_minutes, std::move(pv)),
                 std::string(to_string(spec.shape))};
  out.validate();
  return out;
}

}  // namespace bess
