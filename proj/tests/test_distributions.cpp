#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "linklife/distributions.hpp"
#include "support/quadrature.hpp"
#include "support/stats_utils.hpp"

using namespace linklife;
namespace ref = testsupport::ref;

namespace {

// Table-style parameter points used across the numeric checks.
const Params gauss_p{76.9, 13.8, 0.0};
const Params gev_p{71.1, 12.5, -0.125};
const Params gumbel_p{71.1, 12.5, 0.0};
const Params logi_p{0.0, 7.95, 0.0};
const Params logn_p{4.3, 0.18, 0.0};

struct Case {
  Family family;
  Params params;
};

const Case cases[] = {
    {Family::gaussian, gauss_p}, {Family::gev, gev_p},
    {Family::gumbel, gumbel_p},  {Family::lognormal, logn_p},
    {Family::logistic, logi_p},
};

// A grid well inside the support, spanning the bulk of the mass.
std::vector<double> interior_grid(Family f, const Params& p, int n) {
  std::vector<double> xs;
  const double p_lo = 0.001, p_hi = 0.999;
  const double lo = quantile(f, p, p_lo);
  const double hi = quantile(f, p, p_hi);
  for (int i = 0; i < n; ++i) {
    xs.push_back(lo + (hi - lo) * (static_cast<double>(i) + 0.5) /
                          static_cast<double>(n));
  }
  return xs;
}

}  // namespace

TEST_CASE("pdf peak values match closed-form evaluation") {
  CHECK(pdf(Family::gaussian, gauss_p, 76.9) ==
        Catch::Approx(ref::gaussian_peak_13p8).epsilon(1e-13));
  CHECK(pdf(Family::gev, gev_p, 71.1) ==
        Catch::Approx(ref::gev_peak_12p5).epsilon(1e-13));
  CHECK(pdf(Family::logistic, logi_p, 0.0) ==
        Catch::Approx(ref::logistic_peak_7p95).epsilon(1e-13));
}

TEST_CASE("cdf fixed points") {
  CHECK(cdf(Family::logistic, logi_p, 9.0) ==
        Catch::Approx(ref::logistic_cdf_9_s7p95).epsilon(1e-13));
  CHECK(cdf(Family::gaussian, gauss_p, 76.9) == 0.5);
  CHECK(cdf(Family::logistic, logi_p, 0.0) == 0.5);
  CHECK(cdf(Family::gumbel, gumbel_p, 71.1) ==
        Catch::Approx(ref::exp_neg_one).epsilon(1e-15));
}

TEST_CASE("quantile fixed points and domain") {
  CHECK(quantile(Family::logistic, logi_p, 0.5) == 0.0);
  CHECK(quantile(Family::gaussian, gauss_p, 0.975) ==
        Catch::Approx(76.9 + ref::z_975 * 13.8).epsilon(1e-12));
  CHECK_THROWS_AS(quantile(Family::gaussian, gauss_p, 0.0), std::domain_error);
  CHECK_THROWS_AS(quantile(Family::gaussian, gauss_p, 1.0), std::domain_error);
  CHECK_THROWS_AS(quantile(Family::logistic, logi_p, -0.2), std::domain_error);
}

TEST_CASE("invalid parameters raise domain errors") {
  CHECK_THROWS_AS(pdf(Family::gaussian, Params{0.0, 0.0, 0.0}, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(cdf(Family::logistic, Params{0.0, -1.0, 0.0}, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(
      quantile(Family::gev, Params{0.0, std::nan(""), 0.0}, 0.5),
      std::domain_error);
}

TEST_CASE("GEV density is zero outside its support") {
  // k < 0: upper endpoint at mu - sigma/k
  const double upper = 71.1 + 12.5 / 0.125;
  CHECK(pdf(Family::gev, gev_p, upper + 1.0) == 0.0);
  CHECK(pdf(Family::gev, gev_p, upper) == 0.0);
  CHECK(pdf(Family::gev, gev_p, upper - 1e-13) == 0.0);  // edge snap
  CHECK(pdf(Family::gev, gev_p, upper - 1.0) > 0.0);
  CHECK(cdf(Family::gev, gev_p, upper + 1.0) == 1.0);

  const Params frechet{10.0, 2.0, 0.5};
  const double lower = 10.0 - 2.0 / 0.5;
  CHECK(pdf(Family::gev, frechet, lower - 1.0) == 0.0);
  CHECK(pdf(Family::gev, frechet, lower + 1e-13) == 0.0);
  CHECK(pdf(Family::gev, frechet, lower + 1.0) > 0.0);
  CHECK(cdf(Family::gev, frechet, lower - 1.0) == 0.0);
}

TEST_CASE("every family integrates to one over its support") {
  for (const Case& c : cases) {
    const double lo = quantile(c.family, c.params, 1e-10);
    const double hi = quantile(c.family, c.params, 1.0 - 1e-10);
    const double integral = testsupport::integrate(
        [&](double x) { return pdf(c.family, c.params, x); }, lo, hi, 1e-10);
    INFO(family_name(c.family));
    CHECK(std::abs(integral - 1.0) <= 1e-6);
  }
}

TEST_CASE("GEV k-branch agrees with the Gumbel branch near k = 0") {
  auto branch_gap = [](double k) {
    double max_abs_diff = 0.0;
    double max_pdf = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double z = -5.0 + 10.0 * static_cast<double>(i) / 99.0;
      const double general =
          std::exp(detail::gev_log_pdf_general(z, 12.5, k));
      const double gumbel = std::exp(detail::gumbel_log_pdf(z, 12.5));
      max_abs_diff = std::max(max_abs_diff, std::abs(general - gumbel));
      max_pdf = std::max(max_pdf, gumbel);
    }
    return max_abs_diff / max_pdf;
  };
  // at the reference shape the branches agree to 1e-9 in relative sup norm
  CHECK(branch_gap(1e-10) <= 1e-9);
  CHECK(branch_gap(-1e-10) <= 1e-9);
  // the residual gap is the genuine O(k) distribution difference, so it
  // stays proportional to k all the way up to the switch threshold
  for (double k : {1e-8, -1e-8, 1e-9, -1e-9}) {
    INFO("k = " << k);
    CHECK(branch_gap(k) <= std::abs(k));
  }
}

TEST_CASE("cdf is the integral of pdf (centered differences)") {
  for (const Case& c : cases) {
    const double h = 0.002 * c.params.sigma;
    for (double x : interior_grid(c.family, c.params, 100)) {
      const double fd =
          (cdf(c.family, c.params, x + h) - cdf(c.family, c.params, x - h)) /
          (2.0 * h);
      INFO(family_name(c.family) << " at x = " << x);
      CHECK(std::abs(fd - pdf(c.family, c.params, x)) <= 1e-6);
    }
  }
}

TEST_CASE("cdf(quantile(p)) = p to 1e-10 relative") {
  for (const Case& c : cases) {
    for (int i = 1; i <= 99; ++i) {
      const double p = static_cast<double>(i) / 100.0;
      const double q = quantile(c.family, c.params, p);
      const double back = cdf(c.family, c.params, q);
      INFO(family_name(c.family) << " p = " << p);
      CHECK(std::abs(back - p) <= 1e-10 * p);
    }
  }
}

TEST_CASE("quantile(cdf(x)) = x on the support interior") {
  for (const Case& c : cases) {
    for (double x : interior_grid(c.family, c.params, 50)) {
      const double round_trip = quantile(c.family, c.params, cdf(c.family, c.params, x));
      INFO(family_name(c.family) << " x = " << x);
      CHECK(std::abs(round_trip - x) <= 1e-9 * std::max(1.0, std::abs(x)));
    }
  }
}

TEST_CASE("quantile is monotone in p") {
  for (const Case& c : cases) {
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 199; ++i) {
      const double q = quantile(c.family, c.params, static_cast<double>(i) / 200.0);
      CHECK(q >= prev);
      prev = q;
    }
  }
}

TEST_CASE("sample basics: emptiness, determinism, support") {
  CHECK(sample(Family::gaussian, gauss_p, 0, 1).empty());

  const auto a = sample(Family::gev, gev_p, 1000, 42);
  const auto b = sample(Family::gev, gev_p, 1000, 42);
  CHECK(a == b);
  const auto c = sample(Family::gev, gev_p, 1000, 43);
  CHECK(a != c);

  const auto [lo, hi] = support(Family::gev, gev_p);
  for (double x : a) {
    CHECK(x > lo);
    CHECK(x < hi);
  }
  CHECK_THROWS_AS(sample(Family::gaussian, gauss_p, -1, 1), std::invalid_argument);
}

TEST_CASE("a million GEV draws match the analytic cdf") {
  const auto xs = sample(Family::gev, gev_p, 1000000, 2718);
  const double d = testsupport::ks_stat(
      xs, [&](double x) { return cdf(Family::gev, gev_p, x); });
  CHECK(d <= 0.002);
}

TEST_CASE("family names round-trip") {
  for (Family f : all_families) {
    CHECK(family_from_name(family_name(f)) == f);
  }
  CHECK(!family_from_name("cauchy").has_value());
  CHECK(family_param_count(Family::gev) == 3);
  CHECK(family_param_count(Family::gumbel) == 2);
}
