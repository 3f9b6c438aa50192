#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "linklife/connectivity.hpp"
#include "linklife/detail/rng.hpp"
#include "linklife/distributions.hpp"
#include "linklife/ingest.hpp"
#include "linklife/relvel.hpp"
#include "linklife/units.hpp"

namespace linklife {

struct SimConfig {
  std::int64_t n_draws = 0;
  std::uint64_t seed = 1;
  std::int64_t chunk_size = detail::default_chunk_size;  // determinism unit
};

inline void validate(const SimConfig& cfg) {
  if (cfg.n_draws < 0) throw std::invalid_argument("n_draws must be >= 0");
  if (cfg.chunk_size < 1) throw std::invalid_argument("chunk_size must be >= 1");
}

// Sorted finite draws plus tail-censoring bookkeeping. Draws censored into
// the upper tail count toward n but sit above every finite evaluation point.
struct SimReport {
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::vector<double> sorted_samples;  // finite draws, ascending
  std::int64_t censored_tail = 0;
  std::optional<double> ks_distance;

  double ecdf(double x) const {
    if (n == 0) return 0.0;
    const auto it =
        std::upper_bound(sorted_samples.begin(), sorted_samples.end(), x);
    return static_cast<double>(it - sorted_samples.begin()) /
           static_cast<double>(n);
  }

  // Evenly spaced order statistics for compact export.
  std::vector<std::pair<double, double>> ecdf_grid(std::size_t max_points = 257) const {
    std::vector<std::pair<double, double>> out;
    const std::size_t m = sorted_samples.size();
    if (m == 0) return out;
    const std::size_t points = std::min(max_points, m);
    out.reserve(points);
    for (std::size_t j = 0; j < points; ++j) {
      const std::size_t i = (points == 1) ? m - 1 : j * (m - 1) / (points - 1);
      out.emplace_back(sorted_samples[i],
                       static_cast<double>(i + 1) / static_cast<double>(n));
    }
    return out;
  }
};

using ReferenceCdf = std::function<double(double)>;

// Kolmogorov-Smirnov sup distance of the report's ECDF against a reference.
inline double ks_against(const SimReport& report, const ReferenceCdf& ref) {
  if (report.n == 0) throw std::invalid_argument("ks_against: empty report");
  const double n = static_cast<double>(report.n);
  double d = 0.0;
  for (std::size_t i = 0; i < report.sorted_samples.size(); ++i) {
    const double f = ref(report.sorted_samples[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::abs(static_cast<double>(i) / n - f));
  }
  return d;
}

namespace detail {

template <class DrawFn>
SimReport run_mc(const SimConfig& cfg, const ReferenceCdf& ref, DrawFn&& draw) {
  validate(cfg);
  SimReport report;
  report.n = cfg.n_draws;
  report.seed = cfg.seed;
  std::vector<double> values(static_cast<std::size_t>(cfg.n_draws));
  for_each_chunked_draw(cfg.n_draws, cfg.seed, cfg.chunk_size,
                        [&](std::int64_t i, U01Stream& u) {
                          values[static_cast<std::size_t>(i)] = draw(u);
                        });
  report.sorted_samples.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v)) {
      report.sorted_samples.push_back(v);
    } else {
      ++report.censored_tail;
    }
  }
  std::sort(report.sorted_samples.begin(), report.sorted_samples.end());
  if (ref && report.n > 0) report.ks_distance = ks_against(report, ref);
  return report;
}

}  // namespace detail

// Monte Carlo of the pairwise difference X_a - X_b. Each draw consumes two
// uniforms from its chunk substream, so results are reproducible per
// (seed, chunk_size) no matter how chunks are scheduled.
inline SimReport mc_relvel(Family fam_a, const Params& par_a, Family fam_b,
                           const Params& par_b, const SimConfig& cfg,
                           const ReferenceCdf& reference = {}) {
  validate_params(fam_a, par_a);
  validate_params(fam_b, par_b);
  return detail::run_mc(cfg, reference, [&](detail::U01Stream& u) {
    const double xa = quantile(fam_a, par_a, u.next());
    const double xb = quantile(fam_b, par_b, u.next());
    return xa - xb;
  });
}

// Near-zero |dv| would map to astronomically long durations; such draws are
// censored into the upper tail instead of producing infinities in the ECDF.
inline constexpr double min_abs_dv_kmh = 1e-12;

// Monte Carlo of T = 2R/|dv| with the same unit chain as the analytic
// transform in connectivity.
inline SimReport mc_duration(const RelVelModel& rel_model, double range_m,
                             const SimConfig& cfg,
                             const ReferenceCdf& reference = {}) {
  if (!(range_m > 0.0) || !std::isfinite(range_m)) {
    throw std::domain_error("mc_duration: range must be positive and finite");
  }
  const double axis_factor = mps_to_kmh(2.0 * range_m);
  return detail::run_mc(cfg, reference, [&](detail::U01Stream& u) {
    const double dv = rel_model.quantile(u.next());
    const double abs_dv = std::abs(dv);
    if (abs_dv < min_abs_dv_kmh) {
      return std::numeric_limits<double>::infinity();
    }
    return axis_factor / abs_dv;
  });
}

// ---------------------------------------------------------------------------
// Synthetic trace generation

enum class RegimeLabel { free_flow, transition, congested };

inline const char* regime_label_name(RegimeLabel l) {
  switch (l) {
    case RegimeLabel::free_flow: return "free_flow";
    case RegimeLabel::transition: return "transition";
    case RegimeLabel::congested: return "congested";
  }
  return "?";
}

inline std::optional<RegimeLabel> regime_label_from_name(std::string_view name) {
  for (RegimeLabel l : {RegimeLabel::free_flow, RegimeLabel::transition,
                        RegimeLabel::congested}) {
    if (name == regime_label_name(l)) return l;
  }
  return std::nullopt;
}

struct RegimeSpec {
  RegimeLabel label = RegimeLabel::free_flow;
  Family velocity_family = Family::gaussian;
  Params velocity_params;
  double flow_rate_vph = 1000.0;    // per lane
  double consec_correlation = 0.0;  // AR(1)-style mixing of consecutive speeds
  double duration_s = 3600.0;
};

struct TraceConfig {
  std::vector<RegimeSpec> regimes;
  SensorGeometry geometry;
  int lanes = 1;
  std::string station_id = "S1";
};

inline void validate(const TraceConfig& cfg) {
  if (cfg.regimes.empty()) {
    throw std::invalid_argument("synth_trace: need at least one regime");
  }
  if (cfg.lanes < 1) throw std::invalid_argument("synth_trace: lanes must be >= 1");
  validate(cfg.geometry);
  for (const RegimeSpec& r : cfg.regimes) {
    validate_params(r.velocity_family, r.velocity_params);
    if (!(r.duration_s > 0.0)) {
      throw std::invalid_argument("synth_trace: regime duration must be positive");
    }
    if (!(r.flow_rate_vph > 0.0)) {
      throw std::invalid_argument("synth_trace: flow rate must be positive");
    }
    if (!(r.consec_correlation >= 0.0 && r.consec_correlation < 1.0)) {
      throw std::invalid_argument("synth_trace: correlation must be in [0, 1)");
    }
    if (cdf(r.velocity_family, r.velocity_params, 0.0) > 1e-3) {
      throw std::invalid_argument(
          std::string("synth_trace: regime '") + regime_label_name(r.label) +
          "' velocity family puts more than 1e-3 mass at non-positive speeds");
    }
  }
}

namespace detail {

inline constexpr double min_headway_s = 0.5;
inline constexpr double min_velocity_kmh = 1.0;

inline double truncated_velocity_draw(Family f, const Params& p, U01Stream& u) {
  for (int tries = 0; tries < 10000; ++tries) {
    const double v = quantile(f, p, u.next());
    if (v > min_velocity_kmh) return v;
  }
  throw std::runtime_error("synth_trace: velocity resampling did not terminate");
}

}  // namespace detail

// Generates a trace CSV byte stream: per lane, Poisson-like arrivals with a
// minimum gap, AR(1)-mixed consecutive velocities truncated above 1 km/hr,
// and tick quantization at the sensor clock. The output always parses back
// through parse_trace.
inline std::string synth_trace(const TraceConfig& cfg, std::uint64_t seed) {
  validate(cfg);

  double total_duration = 0.0;
  for (const RegimeSpec& r : cfg.regimes) total_duration += r.duration_s;

  struct Arrival {
    std::int64_t up_tick;
    std::int64_t down_tick;
    int lane;
  };
  std::vector<Arrival> arrivals;

  for (int lane = 0; lane < cfg.lanes; ++lane) {
    detail::U01Stream u(
        detail::substream_seed(seed, static_cast<std::uint64_t>(lane)));
    double t = 0.0;
    std::size_t regime_idx = 0;
    double regime_end = cfg.regimes[0].duration_s;
    double prev_v = 0.0;
    bool have_prev = false;

    while (true) {
      const RegimeSpec& regime = cfg.regimes[regime_idx];
      const double rate = regime.flow_rate_vph / 3600.0;
      const double headway =
          std::max(detail::min_headway_s, -std::log(u.next()) / rate);
      t += headway;
      if (t >= total_duration) break;
      while (t >= regime_end && regime_idx + 1 < cfg.regimes.size()) {
        ++regime_idx;
        regime_end += cfg.regimes[regime_idx].duration_s;
      }
      const RegimeSpec& active = cfg.regimes[regime_idx];

      const double fresh = detail::truncated_velocity_draw(
          active.velocity_family, active.velocity_params, u);
      const double rho = active.consec_correlation;
      const double v = have_prev ? rho * prev_v + (1.0 - rho) * fresh : fresh;
      prev_v = v;
      have_prev = true;

      const double travel_s = cfg.geometry.loop_spacing_m / kmh_to_mps(v);
      const auto up_tick =
          static_cast<std::int64_t>(std::llround(t * cfg.geometry.tick_rate_hz));
      auto down_tick = static_cast<std::int64_t>(
          std::llround((t + travel_s) * cfg.geometry.tick_rate_hz));
      if (down_tick <= up_tick) down_tick = up_tick + 1;
      arrivals.push_back({up_tick, down_tick, lane});
    }
  }

  std::sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
    if (a.up_tick != b.up_tick) return a.up_tick < b.up_tick;
    return a.lane < b.lane;
  });

  std::vector<VehicleTransit> records;
  records.reserve(arrivals.size());
  for (const Arrival& a : arrivals) {
    records.push_back({cfg.station_id, std::to_string(a.lane + 1), a.up_tick,
                       a.down_tick});
  }
  return serialize_trace(records);
}

}  // namespace linklife
