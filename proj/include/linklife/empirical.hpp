#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "linklife/ingest.hpp"
#include "linklife/io.hpp"

namespace linklife {

// Step function F(x) = (#samples <= x) / n. Ties are kept, so the step at a
// repeated value jumps by a multiple of 1/n.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw std::invalid_argument("no samples");
    for (double v : sorted_) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("samples must be finite");
      }
    }
    std::sort(sorted_.begin(), sorted_.end());
  }

  double operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) /
           static_cast<double>(sorted_.size());
  }

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted_values() const { return sorted_; }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }

 private:
  std::vector<double> sorted_;
};

struct HourlyStat {
  int hour = 0;  // 0..23
  double mean_kmh = 0.0;
  std::size_t count = 0;
};

using HourlySeries = std::vector<HourlyStat>;

// Per-hour arithmetic mean of velocities over a single 24-hour span.
// Hours with no samples are omitted.
inline HourlySeries hourly_means(const std::vector<VelocitySample>& samples) {
  double sum[24] = {};
  std::size_t count[24] = {};
  for (const VelocitySample& s : samples) {
    if (!(s.time_s >= 0.0) || !(s.time_s < 86400.0)) {
      throw std::invalid_argument("hourly_means: sample outside the 24-hour span");
    }
    const int h = static_cast<int>(s.time_s / 3600.0);
    sum[h] += s.velocity_kmh;
    ++count[h];
  }
  HourlySeries out;
  for (int h = 0; h < 24; ++h) {
    if (count[h] > 0) {
      out.push_back({h, sum[h] / static_cast<double>(count[h]), count[h]});
    }
  }
  return out;
}

// CSV "x,F" pairs on a caller-supplied grid, for external plotting.
template <class Cdf>
void write_cdf_curve(std::ostream& out, Cdf&& model_cdf,
                     const std::vector<double>& grid) {
  out << "x,F\n";
  for (double x : grid) {
    out << fmt_double(x) << ',' << fmt_double(model_cdf(x)) << '\n';
  }
}

// Root-mean-square deviation between a model CDF and the empirical plotting
// positions p_i = (i - 0.5)/n at the sorted sample points. This is the
// model-comparison metric used throughout.
template <class Cdf>
double rmse_cdf(Cdf&& model_cdf, const EmpiricalCdf& ecdf) {
  const std::vector<double>& xs = ecdf.sorted_values();
  const double n = static_cast<double>(xs.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double p = (static_cast<double>(i) + 0.5) / n;
    const double r = model_cdf(xs[i]) - p;
    ss += r * r;
  }
  return std::sqrt(ss / n);
}

}  // namespace linklife
