#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "linklife/relvel.hpp"
#include "linklife/units.hpp"

namespace linklife {

struct ConnectivitySetup {
  double range_m = 100.0;
};

inline void validate(const ConnectivitySetup& s) {
  if (!(s.range_m > 0.0) || !std::isfinite(s.range_m)) {
    throw std::domain_error("communication range must be positive and finite");
  }
}

// Law of the connectivity duration T = 2R/|dv|: two vehicles stay within
// range R for as long as their separation grows by less than 2R. The
// relative-velocity model lives on a km/hr axis while R is meters and T
// seconds, so the transform works through X(t) = 2R/t converted to km/hr.
class DurationDistribution {
 public:
  DurationDistribution(ConnectivitySetup setup, RelVelModel rel_model)
      : setup_(setup), rel_(std::move(rel_model)) {
    validate(setup_);
    // 2R expressed on the model's km/hr axis; T = axis_factor / |dv_kmh|.
    axis_factor_ = mps_to_kmh(2.0 * setup_.range_m);
  }

  // Density per second. Zero for t <= 0 (duration is positive by
  // construction); the t -> 0+ limit is also zero because the transformed
  // argument escapes to infinity faster than the Jacobian grows.
  double pdf(double t_s) const {
    if (!(t_s > 0.0)) return 0.0;
    const double x = axis_factor_ / t_s;
    double dens = rel_.symmetric ? 2.0 * rel_.pdf(x) : rel_.pdf(x) + rel_.pdf(-x);
    if (dens == 0.0) return 0.0;
    return dens * axis_factor_ / (t_s * t_s);
  }

  // P(T <= t) = P(|dv| >= 2R/t).
  double cdf(double t_s) const {
    if (!(t_s > 0.0)) return 0.0;
    const double x = axis_factor_ / t_s;
    const double inside = rel_.cdf(x) - rel_.cdf(-x);
    return std::clamp(1.0 - inside, 0.0, 1.0);
  }

  double prob_connected_longer(double t_s) const { return 1.0 - cdf(t_s); }

  const RelVelModel& rel_model() const { return rel_; }
  double range_m() const { return setup_.range_m; }

 private:
  ConnectivitySetup setup_;
  RelVelModel rel_;
  double axis_factor_ = 0.0;
};

struct DurationPoint {
  double t_s = 0.0;
  double pdf_per_s = 0.0;
  double cdf = 0.0;
};

// Tabulates pdf and cdf on a strictly increasing positive time grid, ready
// for CSV export and plotting.
inline std::vector<DurationPoint> emit_duration_curve(
    const DurationDistribution& d, const std::vector<double>& t_grid) {
  if (t_grid.empty()) {
    throw std::invalid_argument("emit_duration_curve: empty grid");
  }
  double prev = 0.0;
  for (double t : t_grid) {
    if (!(t > prev) || !std::isfinite(t)) {
      throw std::invalid_argument(
          "emit_duration_curve: grid must be strictly increasing and positive");
    }
    prev = t;
  }
  std::vector<DurationPoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) out.push_back({t, d.pdf(t), d.cdf(t)});
  return out;
}

}  // namespace linklife
