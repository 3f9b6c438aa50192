#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "linklife/detail/nelder_mead.hpp"
#include "linklife/distributions.hpp"
#include "linklife/empirical.hpp"

namespace linklife {

enum class FitMethod { mle, cdf_least_squares };

struct FitResult {
  Family family = Family::gaussian;
  Params params;
  double log_likelihood = 0.0;
  double rmse = 0.0;  // against the ECDF of the fitted samples
  std::int64_t n = 0;
  bool converged = false;
};

namespace detail {

inline constexpr double euler_gamma = 0.5772156649015329;
inline constexpr double pi_const = 3.141592653589793;

struct SampleStats {
  double mean = 0.0;
  double sd = 0.0;  // population (1/n) form, matching the Gaussian MLE
};

inline SampleStats sample_stats(const std::vector<double>& xs) {
  SampleStats st;
  const double n = static_cast<double>(xs.size());
  st.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - st.mean) * (x - st.mean);
  st.sd = std::sqrt(ss / n);
  return st;
}

inline double total_log_likelihood(Family f, const Params& p,
                                   const std::vector<double>& xs) {
  double ll = 0.0;
  for (double x : xs) ll += log_pdf(f, p, x);
  return ll;
}

// Moment-based starting points: Gumbel moments for the extreme-value
// families (k starts at the nested Gumbel), direct moments otherwise.
inline Params initial_params(Family f, const SampleStats& st) {
  Params p;
  switch (f) {
    case Family::gaussian:
      p.mu = st.mean;
      p.sigma = st.sd;
      break;
    case Family::logistic:
      p.mu = st.mean;
      p.sigma = st.sd * std::sqrt(3.0) / pi_const;
      break;
    case Family::gumbel:
    case Family::gev:
      p.sigma = st.sd * std::sqrt(6.0) / pi_const;
      p.mu = st.mean - euler_gamma * p.sigma;
      p.k = 0.0;
      break;
    case Family::lognormal:
      break;  // handled in closed form
  }
  return p;
}

inline Params unpack_point(Family f, const std::vector<double>& v) {
  Params p;
  p.mu = v[0];
  p.sigma = std::exp(v[1]);
  if (f == Family::gev) p.k = v[2];
  return p;
}

inline std::vector<double> pack_point(Family f, const Params& p) {
  std::vector<double> v{p.mu, std::log(p.sigma)};
  if (f == Family::gev) v.push_back(p.k);
  return v;
}

inline FitResult finish_fit(Family f, const Params& p, bool converged,
                            const std::vector<double>& samples,
                            const EmpiricalCdf& ecdf) {
  FitResult r;
  r.family = f;
  r.params = p;
  r.converged = converged;
  r.n = static_cast<std::int64_t>(samples.size());
  r.log_likelihood = total_log_likelihood(f, p, samples);
  r.rmse = rmse_cdf([&](double x) { return cdf(f, p, x); }, ecdf);
  return r;
}

}  // namespace detail

inline std::int64_t min_fit_samples(Family f) {
  return family_param_count(f) == 3 ? 8 : 2;
}

// Parameter estimation for one family. MLE is the default; the CDF
// least-squares mode minimizes the rmse_cdf objective instead and exists for
// sensitivity checks. Gaussian and lognormal MLEs are closed form; the rest
// run a simplex search over (mu, log sigma[, k]). Non-convergence is reported
// through the flag with the best-found parameters, never an exception.
inline FitResult fit_dist(const std::vector<double>& samples, Family family,
                          FitMethod method = FitMethod::mle) {
  const auto n = static_cast<std::int64_t>(samples.size());
  if (n < min_fit_samples(family)) {
    throw std::invalid_argument(
        std::string("fit: need at least ") +
        std::to_string(min_fit_samples(family)) + " samples for " +
        family_name(family) + ", got " + std::to_string(n));
  }
  for (double x : samples) {
    if (!std::isfinite(x)) throw std::invalid_argument("fit: non-finite sample");
  }
  if (family == Family::lognormal) {
    for (double x : samples) {
      if (x <= 0.0) throw std::domain_error("fit: lognormal requires positive samples");
    }
  }

  const EmpiricalCdf ecdf{samples};

  // Closed-form starting point (and, for MLE, the final answer) for the
  // Gaussian-kernel families.
  std::vector<double> work = samples;
  if (family == Family::lognormal) {
    for (double& x : work) x = std::log(x);
  }
  const detail::SampleStats st = detail::sample_stats(work);
  if (st.sd <= 0.0) {
    throw std::domain_error("fit: samples have zero variance");
  }

  Params init = detail::initial_params(family, st);
  if (family == Family::lognormal) {
    init.mu = st.mean;
    init.sigma = st.sd;
  }

  const bool closed_form_mle =
      family == Family::gaussian || family == Family::lognormal;
  if (method == FitMethod::mle && closed_form_mle) {
    return detail::finish_fit(family, init, true, samples, ecdf);
  }

  std::function<double(const std::vector<double>&)> objective;
  if (method == FitMethod::mle) {
    objective = [&](const std::vector<double>& v) {
      const Params p = detail::unpack_point(family, v);
      const double ll = detail::total_log_likelihood(family, p, samples);
      return std::isfinite(ll) ? -ll : 1e300;
    };
  } else {
    objective = [&](const std::vector<double>& v) {
      const Params p = detail::unpack_point(family, v);
      if (!std::isfinite(p.sigma) || p.sigma <= 0.0) return 1e300;
      const double r =
          rmse_cdf([&](double x) { return cdf(family, p, x); }, ecdf);
      return std::isfinite(r) ? r : 1e300;
    };
  }

  std::vector<double> x0 = detail::pack_point(family, init);
  std::vector<double> step{0.1 * init.sigma, 0.1};
  if (family == Family::gev) step.push_back(0.05);

  const detail::SimplexResult sol =
      detail::nelder_mead_restarted(objective, x0, step);
  const Params fitted = detail::unpack_point(family, sol.x);
  return detail::finish_fit(family, fitted, sol.converged, samples, ecdf);
}

inline FitResult fit_mle(const std::vector<double>& samples, Family family) {
  return fit_dist(samples, family, FitMethod::mle);
}

struct FamilyFitError {
  Family family = Family::gaussian;
  std::string message;
};

struct ModelRanking {
  std::vector<FitResult> ranked;  // by rmse ascending
  std::vector<FamilyFitError> failures;
};

// Fits every requested family and sorts by rmse. A family whose fit throws
// is reported as an annotation; the remaining families are still ranked.
// Ties break toward fewer parameters, then family enumeration order.
inline ModelRanking rank_models(const std::vector<double>& samples,
                                const std::vector<Family>& families,
                                FitMethod method = FitMethod::mle) {
  ModelRanking out;
  for (Family f : families) {
    try {
      out.ranked.push_back(fit_dist(samples, f, method));
    } catch (const std::exception& e) {
      out.failures.push_back({f, e.what()});
    }
  }
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const FitResult& a, const FitResult& b) {
                     const double ra = std::isnan(a.rmse)
                                           ? std::numeric_limits<double>::infinity()
                                           : a.rmse;
                     const double rb = std::isnan(b.rmse)
                                           ? std::numeric_limits<double>::infinity()
                                           : b.rmse;
                     if (ra != rb) return ra < rb;
                     const int pa = family_param_count(a.family);
                     const int pb = family_param_count(b.family);
                     if (pa != pb) return pa < pb;
                     return static_cast<int>(a.family) < static_cast<int>(b.family);
                   });
  return out;
}

}  // namespace linklife
