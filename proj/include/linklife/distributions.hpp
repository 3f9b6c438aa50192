#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linklife/detail/normal_quantile.hpp"
#include "linklife/detail/rng.hpp"

namespace linklife {

// Parametric velocity / velocity-difference families. Gumbel is the k = 0
// member of the GEV family but is kept as its own tag so two-parameter fits
// and the difference theorem can name it directly.
enum class Family { gaussian, gev, gumbel, lognormal, logistic };

inline constexpr Family all_families[] = {Family::gaussian, Family::gev,
                                          Family::gumbel, Family::lognormal,
                                          Family::logistic};

inline const char* family_name(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::gev: return "gev";
    case Family::gumbel: return "gumbel";
    case Family::lognormal: return "lognormal";
    case Family::logistic: return "logistic";
  }
  return "?";
}

inline std::optional<Family> family_from_name(std::string_view name) {
  for (Family f : all_families) {
    if (name == family_name(f)) return f;
  }
  return std::nullopt;
}

inline int family_param_count(Family f) {
  return f == Family::gev ? 3 : 2;
}

// Location/scale(/shape) parameter vector. mu and sigma are km/hr at module
// boundaries (log-km/hr for the lognormal); k is the dimensionless GEV shape
// and is ignored by the other families.
struct Params {
  double mu = 0.0;
  double sigma = 1.0;
  double k = 0.0;
};

namespace detail {

// Below this the GEV k != 0 branch is numerically indistinguishable from
// Gumbel and we switch to the k = 0 expressions.
inline constexpr double gev_shape_tol = 1e-8;

// Samples this close to a finite GEV support endpoint are treated as on it:
// density 0, so likelihood-based fits reject the parameter point instead of
// blowing up.
inline constexpr double support_edge_tol = 1e-12;

inline bool gev_has_finite_edge(const Params& p) {
  return std::abs(p.k) >= gev_shape_tol;
}

inline double gev_edge(const Params& p) { return p.mu - p.sigma / p.k; }

}  // namespace detail

inline void validate_params(Family f, const Params& p) {
  if (!std::isfinite(p.mu) || !std::isfinite(p.sigma) || !std::isfinite(p.k)) {
    throw std::domain_error("distribution parameters must be finite");
  }
  if (p.sigma <= 0.0) {
    throw std::domain_error("scale parameter must be positive");
  }
  (void)f;
}

// Closed support interval (open endpoints are represented by +-inf).
inline std::pair<double, double> support(Family f, const Params& p) {
  validate_params(f, p);
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (f) {
    case Family::lognormal:
      return {0.0, inf};
    case Family::gev:
      if (detail::gev_has_finite_edge(p)) {
        const double edge = detail::gev_edge(p);
        return p.k > 0 ? std::pair{edge, inf} : std::pair{-inf, edge};
      }
      return {-inf, inf};
    default:
      return {-inf, inf};
  }
}

namespace detail {

inline double log1p_exp(double t) {  // log(1 + e^t), overflow safe
  return t > 35.0 ? t : std::log1p(std::exp(t));
}

inline double gaussian_log_pdf(double z, double sigma) {
  return -0.5 * z * z - std::log(sigma * sqrt_two_pi);
}

inline double logistic_log_pdf(double z, double sigma) {
  // -log sigma - z - 2 log(1 + e^-z), evaluated through |z| for symmetry.
  const double az = std::abs(z);
  return -std::log(sigma) - az - 2.0 * log1p_exp(-az);
}

inline double gumbel_log_pdf(double z, double sigma) {
  return -std::log(sigma) - z - std::exp(-z);
}

// k != 0 branch of the GEV log-density at standardized z. Returns -inf
// outside the support. Exposed so branch-consistency tests can force it.
inline double gev_log_pdf_general(double z, double sigma, double k) {
  const double w = k * z;
  if (w <= -1.0) return -std::numeric_limits<double>::infinity();
  const double log_t = -std::log1p(w) / k;
  return -std::log(sigma) + (k + 1.0) * log_t - std::exp(log_t);
}

inline double gev_log_pdf(double x, const Params& p) {
  const double z = (x - p.mu) / p.sigma;
  if (!gev_has_finite_edge(p)) return gumbel_log_pdf(z, p.sigma);
  const double edge = gev_edge(p);
  if (p.k > 0 ? x <= edge + support_edge_tol : x >= edge - support_edge_tol) {
    return -std::numeric_limits<double>::infinity();
  }
  return gev_log_pdf_general(z, p.sigma, p.k);
}

}  // namespace detail

inline double log_pdf(Family f, const Params& p, double x) {
  validate_params(f, p);
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  if (!std::isfinite(x)) return neg_inf;
  switch (f) {
    case Family::gaussian:
      return detail::gaussian_log_pdf((x - p.mu) / p.sigma, p.sigma);
    case Family::logistic:
      return detail::logistic_log_pdf((x - p.mu) / p.sigma, p.sigma);
    case Family::gumbel:
      return detail::gumbel_log_pdf((x - p.mu) / p.sigma, p.sigma);
    case Family::gev:
      return detail::gev_log_pdf(x, p);
    case Family::lognormal: {
      if (x <= 0.0) return neg_inf;
      const double lx = std::log(x);
      return detail::gaussian_log_pdf((lx - p.mu) / p.sigma, p.sigma) - lx;
    }
  }
  return neg_inf;
}

inline double pdf(Family f, const Params& p, double x) {
  return std::exp(log_pdf(f, p, x));
}

inline double cdf(Family f, const Params& p, double x) {
  validate_params(f, p);
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  switch (f) {
    case Family::gaussian:
      return detail::standard_normal_cdf((x - p.mu) / p.sigma);
    case Family::logistic: {
      const double z = (x - p.mu) / p.sigma;
      return 1.0 / (1.0 + std::exp(-z));
    }
    case Family::gumbel: {
      const double z = (x - p.mu) / p.sigma;
      return std::exp(-std::exp(-z));
    }
    case Family::gev: {
      const double z = (x - p.mu) / p.sigma;
      if (!detail::gev_has_finite_edge(p)) return std::exp(-std::exp(-z));
      const double w = p.k * z;
      if (w <= -1.0) return p.k > 0 ? 0.0 : 1.0;
      return std::exp(-std::exp(-std::log1p(w) / p.k));
    }
    case Family::lognormal:
      if (x <= 0.0) return 0.0;
      return detail::standard_normal_cdf((std::log(x) - p.mu) / p.sigma);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double quantile(Family f, const Params& p, double prob) {
  validate_params(f, p);
  if (!(prob > 0.0 && prob < 1.0)) {
    throw std::domain_error("quantile: probability must be in (0, 1)");
  }
  switch (f) {
    case Family::gaussian:
      return p.mu + p.sigma * detail::standard_normal_quantile(prob);
    case Family::logistic:
      return p.mu + p.sigma * std::log(prob / (1.0 - prob));
    case Family::gumbel:
      return p.mu - p.sigma * std::log(-std::log(prob));
    case Family::gev: {
      if (!detail::gev_has_finite_edge(p)) {
        return p.mu - p.sigma * std::log(-std::log(prob));
      }
      const double log_neg_log_p = std::log(-std::log(prob));
      return p.mu + p.sigma * std::expm1(-p.k * log_neg_log_p) / p.k;
    }
    case Family::lognormal:
      return std::exp(p.mu + p.sigma * detail::standard_normal_quantile(prob));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Inverse-transform sampling. Deterministic for a given seed: the uniform
// stream is chunked (see detail::for_each_chunked_draw), so the output is
// reproducible bit for bit regardless of how callers schedule the work.
inline std::vector<double> sample(Family f, const Params& p, std::int64_t n,
                                  std::uint64_t seed) {
  validate_params(f, p);
  if (n < 0) throw std::invalid_argument("sample: n must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(n));
  detail::for_each_chunked_draw(
      n, seed, detail::default_chunk_size,
      [&](std::int64_t i, detail::U01Stream& u) {
        out[static_cast<std::size_t>(i)] = quantile(f, p, u.next());
      });
  return out;
}

}  // namespace linklife
