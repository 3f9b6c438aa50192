#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linklife/units.hpp"

namespace linklife {

// Dual-loop detector station geometry. Defaults match the classic highway
// installation: loop centers 20 ft apart, 6 ft loops, 60 Hz timestamp clock.
struct SensorGeometry {
  double loop_spacing_m = 6.096;
  double loop_length_m = 1.8288;
  double tick_rate_hz = 60.0;
};

inline void validate(const SensorGeometry& g) {
  if (!(g.loop_spacing_m > 0.0) || !std::isfinite(g.loop_spacing_m) ||
      !(g.loop_length_m > 0.0) || !std::isfinite(g.loop_length_m) ||
      !(g.tick_rate_hz > 0.0) || !std::isfinite(g.tick_rate_hz)) {
    throw std::domain_error("sensor geometry fields must be positive and finite");
  }
}

// One matched upstream/downstream detection pair for one vehicle.
struct VehicleTransit {
  std::string station_id;
  std::string lane_id;
  std::int64_t upstream_tick = 0;
  std::int64_t downstream_tick = 0;
};

struct VelocitySample {
  double time_s = 0.0;
  std::string lane_id;
  double velocity_kmh = 0.0;
};

inline constexpr std::string_view trace_csv_header =
    "station_id,lane_id,upstream_tick,downstream_tick";

struct RowError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct ParseResult {
  std::vector<VehicleTransit> records;
  std::vector<RowError> errors;
};

namespace detail {

inline std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

inline bool parse_i64(std::string_view s, std::int64_t& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && !s.empty();
}

}  // namespace detail

// Parses the trace CSV schema. Malformed rows are reported with their line
// number and skipped; parsing always continues. An empty stream yields an
// empty record list with no errors.
inline ParseResult parse_trace(std::istream& in) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = detail::strip_cr(line);
    if (row.empty() || row.front() == '#') continue;

    if (!header_seen) {
      header_seen = true;
      if (row == trace_csv_header) continue;
      result.errors.push_back(
          {line_no, "expected header '" + std::string(trace_csv_header) + "'"});
      // fall through: try the line as a data row so its content still surfaces
    }

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      fields.push_back(row.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 4) {
      result.errors.push_back(
          {line_no, "expected 4 columns, got " + std::to_string(fields.size())});
      continue;
    }
    if (fields[0].empty() || fields[1].empty()) {
      result.errors.push_back({line_no, "empty station_id or lane_id"});
      continue;
    }
    VehicleTransit rec;
    rec.station_id = std::string(fields[0]);
    rec.lane_id = std::string(fields[1]);
    if (!detail::parse_i64(fields[2], rec.upstream_tick) ||
        !detail::parse_i64(fields[3], rec.downstream_tick)) {
      result.errors.push_back({line_no, "non-integer tick value"});
      continue;
    }
    if (rec.downstream_tick <= rec.upstream_tick) {
      result.errors.push_back({line_no, "non-forward transit"});
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

inline std::string serialize_trace(const std::vector<VehicleTransit>& records) {
  std::string out(trace_csv_header);
  out += '\n';
  for (const VehicleTransit& r : records) {
    out += r.station_id;
    out += ',';
    out += r.lane_id;
    out += ',';
    out += std::to_string(r.upstream_tick);
    out += ',';
    out += std::to_string(r.downstream_tick);
    out += '\n';
  }
  return out;
}

// Speed from the transit-time difference over the loop center spacing.
inline VelocitySample compute_velocity(const VehicleTransit& t,
                                       const SensorGeometry& g) {
  validate(g);
  if (t.downstream_tick <= t.upstream_tick) {
    throw std::invalid_argument("compute_velocity: non-forward transit");
  }
  const double dt_s =
      static_cast<double>(t.downstream_tick - t.upstream_tick) / g.tick_rate_hz;
  VelocitySample s;
  s.time_s = static_cast<double>(t.upstream_tick) / g.tick_rate_hz;
  s.lane_id = t.lane_id;
  s.velocity_kmh = mps_to_kmh(g.loop_spacing_m / dt_s);
  return s;
}

// Partitions samples by floor(time / window). Windows come back in ascending
// index order; empty windows are omitted.
inline std::vector<std::pair<std::int64_t, std::vector<VelocitySample>>>
window_samples(const std::vector<VelocitySample>& samples, double window_s) {
  if (!(window_s > 0.0) || !std::isfinite(window_s)) {
    throw std::invalid_argument("window_samples: window must be positive");
  }
  std::map<std::int64_t, std::vector<VelocitySample>> by_window;
  for (const VelocitySample& s : samples) {
    const auto idx = static_cast<std::int64_t>(std::floor(s.time_s / window_s));
    by_window[idx].push_back(s);
  }
  std::vector<std::pair<std::int64_t, std::vector<VelocitySample>>> out;
  out.reserve(by_window.size());
  for (auto& [idx, group] : by_window) out.emplace_back(idx, std::move(group));
  return out;
}

}  // namespace linklife
