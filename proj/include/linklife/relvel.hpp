#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "linklife/fit.hpp"
#include "linklife/ingest.hpp"

namespace linklife {

// Distribution of the signed velocity difference between consecutive
// same-lane vehicles. Either a closed form (logistic or Gaussian) or a
// tabulated density grid from numerical convolution.
struct RelVelModel {
  enum class Kind { closed, grid };

  Kind kind = Kind::closed;
  Family family = Family::logistic;  // closed kind only
  Params params;

  // grid kind: ascending x with matching density and cumulative values.
  // Repeated x nodes encode jumps (atoms) in the cdf.
  std::vector<double> grid_x;
  std::vector<double> grid_pdf;
  std::vector<double> grid_cdf;

  bool symmetric = false;

  double pdf(double x) const {
    if (kind == Kind::closed) return linklife::pdf(family, params, x);
    if (grid_x.empty() || x < grid_x.front() || x > grid_x.back()) return 0.0;
    const auto it = std::upper_bound(grid_x.begin(), grid_x.end(), x);
    if (it == grid_x.begin()) return grid_pdf.front();
    if (it == grid_x.end()) return grid_pdf.back();
    const std::size_t hi = static_cast<std::size_t>(it - grid_x.begin());
    const std::size_t lo = hi - 1;
    const double span = grid_x[hi] - grid_x[lo];
    if (span <= 0.0) return grid_pdf[hi];
    const double w = (x - grid_x[lo]) / span;
    return grid_pdf[lo] + w * (grid_pdf[hi] - grid_pdf[lo]);
  }

  double cdf(double x) const {
    if (kind == Kind::closed) return linklife::cdf(family, params, x);
    if (grid_x.empty()) return 0.0;
    if (x <= grid_x.front()) return x < grid_x.front() ? 0.0 : grid_cdf.front();
    if (x >= grid_x.back()) return 1.0;
    const auto it = std::upper_bound(grid_x.begin(), grid_x.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - grid_x.begin());
    const std::size_t lo = hi - 1;
    const double span = grid_x[hi] - grid_x[lo];
    if (span <= 0.0) return grid_cdf[hi];
    const double w = (x - grid_x[lo]) / span;
    return grid_cdf[lo] + w * (grid_cdf[hi] - grid_cdf[lo]);
  }

  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
      throw std::domain_error("RelVelModel::quantile: p must be in (0, 1)");
    }
    if (kind == Kind::closed) return linklife::quantile(family, params, p);
    const auto it = std::lower_bound(grid_cdf.begin(), grid_cdf.end(), p);
    if (it == grid_cdf.begin()) return grid_x.front();
    if (it == grid_cdf.end()) return grid_x.back();
    const std::size_t hi = static_cast<std::size_t>(it - grid_cdf.begin());
    const std::size_t lo = hi - 1;
    const double dp = grid_cdf[hi] - grid_cdf[lo];
    if (dp <= 0.0 || grid_x[hi] == grid_x[lo]) return grid_x[hi];
    const double w = (p - grid_cdf[lo]) / dp;
    return grid_x[lo] + w * (grid_x[hi] - grid_x[lo]);
  }
};

// Signed v_{i+1} - v_i over adjacent same-lane pairs, each lane sorted by
// time. Lanes contribute independently and never pair across each other;
// a lane with fewer than two samples contributes nothing.
inline std::vector<double> consecutive_differences(
    const std::vector<VelocitySample>& samples) {
  std::vector<std::string> lane_order;
  std::unordered_map<std::string, std::vector<std::pair<double, double>>> lanes;
  for (const VelocitySample& s : samples) {
    auto [it, inserted] = lanes.try_emplace(s.lane_id);
    if (inserted) lane_order.push_back(s.lane_id);
    it->second.emplace_back(s.time_s, s.velocity_kmh);
  }
  std::vector<double> diffs;
  for (const std::string& lane : lane_order) {
    auto& recs = lanes[lane];
    std::stable_sort(recs.begin(), recs.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < recs.size(); ++i) {
      diffs.push_back(recs[i].second - recs[i - 1].second);
    }
  }
  return diffs;
}

// Difference of two Gumbel variables with a common scale is logistic with
// that scale and the location difference. Unequal scales have no closed
// form; callers are pointed at difference_numeric.
inline RelVelModel gumbel_difference_model(const Params& a, const Params& b) {
  validate_params(Family::gumbel, a);
  validate_params(Family::gumbel, b);
  const double scale_gap = std::abs(a.sigma - b.sigma);
  if (scale_gap > 1e-9 * std::max(a.sigma, b.sigma)) {
    throw std::invalid_argument(
        "gumbel_difference_model requires equal scales; "
        "use difference_numeric for unequal-scale pairs");
  }
  RelVelModel m;
  m.kind = RelVelModel::Kind::closed;
  m.family = Family::logistic;
  m.params.mu = a.mu - b.mu;
  m.params.sigma = 0.5 * (a.sigma + b.sigma);
  m.symmetric = m.params.mu == 0.0;
  return m;
}

struct RelVelFit {
  RelVelModel model;
  FitResult fit;
};

// Fits the empirical differences with a symmetric closed-form family.
// The symmetric flag is set when the fitted location is negligible against
// the scale.
inline RelVelFit fit_relvel(const std::vector<double>& differences,
                            Family family) {
  if (family != Family::logistic && family != Family::gaussian) {
    throw std::invalid_argument(
        "fit_relvel: family must be logistic or gaussian");
  }
  RelVelFit out;
  out.fit = fit_mle(differences, family);
  out.model.kind = RelVelModel::Kind::closed;
  out.model.family = family;
  out.model.params = out.fit.params;
  out.model.symmetric =
      std::abs(out.fit.params.mu) < 0.05 * out.fit.params.sigma;
  return out;
}

// Density of X_a - X_b by numerical cross-correlation of the two densities,
// tabulated on [lo, hi]. The grid must span the difference location by at
// least 8 combined scales; if more than 1e-4 of the mass still falls outside
// the result is rejected with suggested bounds.
inline RelVelModel difference_numeric(Family fam_a, const Params& par_a,
                                      Family fam_b, const Params& par_b,
                                      double lo, double hi,
                                      std::size_t n_points) {
  validate_params(fam_a, par_a);
  validate_params(fam_b, par_b);
  if (n_points < 256) {
    throw std::invalid_argument("difference_numeric: need n_points >= 256");
  }
  if (!(lo < hi)) {
    throw std::invalid_argument("difference_numeric: need lo < hi");
  }
  const double loc = par_a.mu - par_b.mu;
  const double span = 8.0 * (par_a.sigma + par_b.sigma);
  if (lo > loc - span || hi < loc + span) {
    throw std::invalid_argument(
        "difference_numeric: grid must span the difference location by at "
        "least 8 combined scales");
  }

  // Inner integral over the support of f_a, Simpson weights; f_b is
  // evaluated directly so no lattice alignment is needed.
  constexpr double q_eps = 1e-10;
  const double ua_lo = quantile(fam_a, par_a, q_eps);
  const double ua_hi = quantile(fam_a, par_a, 1.0 - q_eps);
  std::size_t m = std::max<std::size_t>(4097, 2 * n_points + 1);
  if (m % 2 == 0) ++m;
  const double hu = (ua_hi - ua_lo) / static_cast<double>(m - 1);

  std::vector<double> fa(m), wu(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = ua_lo + static_cast<double>(i) * hu;
    fa[i] = pdf(fam_a, par_a, u);
    const bool edge = (i == 0 || i == m - 1);
    wu[i] = edge ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    wu[i] *= hu / 3.0;
  }

  RelVelModel model;
  model.kind = RelVelModel::Kind::grid;
  model.grid_x.resize(n_points);
  model.grid_pdf.resize(n_points);
  const double hd = (hi - lo) / static_cast<double>(n_points - 1);
  for (std::size_t j = 0; j < n_points; ++j) {
    const double d = lo + static_cast<double>(j) * hd;
    double g = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (fa[i] == 0.0) continue;
      const double u = ua_lo + static_cast<double>(i) * hu;
      g += wu[i] * fa[i] * pdf(fam_b, par_b, u - d);
    }
    model.grid_x[j] = d;
    model.grid_pdf[j] = g;
  }

  double total = 0.0;
  for (std::size_t j = 1; j < n_points; ++j) {
    total += 0.5 * (model.grid_pdf[j - 1] + model.grid_pdf[j]) * hd;
  }
  if (1.0 - total > 1e-4) {
    const double s_lo = quantile(fam_a, par_a, 1e-8) - quantile(fam_b, par_b, 1.0 - 1e-8);
    const double s_hi = quantile(fam_a, par_a, 1.0 - 1e-8) - quantile(fam_b, par_b, 1e-8);
    throw std::runtime_error(
        "difference_numeric: grid too narrow (tail mass " +
        std::to_string(1.0 - total) + " outside); suggested bounds [" +
        std::to_string(s_lo) + ", " + std::to_string(s_hi) + "]");
  }
  for (double& g : model.grid_pdf) g /= total;

  model.grid_cdf.resize(n_points);
  double acc = 0.0;
  model.grid_cdf[0] = 0.0;
  for (std::size_t j = 1; j < n_points; ++j) {
    acc += 0.5 * (model.grid_pdf[j - 1] + model.grid_pdf[j]) * hd;
    model.grid_cdf[j] = std::min(acc, 1.0);
  }
  model.grid_cdf.back() = 1.0;

  model.symmetric = fam_a == fam_b && par_a.mu == par_b.mu &&
                    par_a.sigma == par_b.sigma && par_a.k == par_b.k;
  return model;
}

}  // namespace linklife
