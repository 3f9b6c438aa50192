// Acceptance suite. Each check prints one PASS/FAIL line with the measured
// value and its runtime; the process exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "linklife/linklife.hpp"
#include "support/quadrature.hpp"

namespace fs = std::filesystem;
using namespace linklife;

namespace {

int failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int index, const std::string& name, bool pass,
            const std::string& detail, double elapsed_s) {
  std::ostringstream line;
  line << (pass ? "PASS" : "FAIL") << "  " << index << ". " << name << ": "
       << detail << "  [" << std::fixed << std::setprecision(2) << elapsed_s
       << " s]";
  std::cout << line.str() << std::endl;
  if (!pass) ++failures;
}

double ulp_at(double x) { return std::nextafter(x, 1e308) - x; }

// 1. pdf normalization at the reference parameter points
void check_normalization() {
  Timer timer;
  struct Case {
    Family family;
    Params params;
  };
  const Case cases[] = {
      {Family::gaussian, {76.9, 13.8, 0.0}},
      {Family::gev, {71.1, 12.5, -0.125}},
      {Family::logistic, {0.0, 7.95, 0.0}},
  };
  double worst = 0.0;
  for (const Case& c : cases) {
    const double lo = quantile(c.family, c.params, 1e-10);
    const double hi = quantile(c.family, c.params, 1.0 - 1e-10);
    const double integral = testsupport::integrate(
        [&](double x) { return pdf(c.family, c.params, x); }, lo, hi, 1e-10);
    worst = std::max(worst, std::abs(integral - 1.0));
  }
  const double elapsed = timer.seconds();
  std::ostringstream d;
  d << "max |integral - 1| = " << std::scientific << worst;
  report(1, "pdf normalization", worst <= 1e-6 && elapsed < 1.0, d.str(),
         elapsed);
}

// 2. GEV k-branch vs Gumbel branch at |k| = 1e-10 (relative sup norm)
void check_gev_continuity() {
  Timer timer;
  const double sigma = 12.5;
  double worst = 0.0;
  for (double k : {1e-10, -1e-10}) {
    double max_diff = 0.0, max_pdf = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double z = -5.0 + 10.0 * static_cast<double>(i) / 99.0;
      const double general = std::exp(detail::gev_log_pdf_general(z, sigma, k));
      const double gumbel = std::exp(detail::gumbel_log_pdf(z, sigma));
      max_diff = std::max(max_diff, std::abs(general - gumbel));
      max_pdf = std::max(max_pdf, gumbel);
    }
    worst = std::max(worst, max_diff / max_pdf);
  }
  const double elapsed = timer.seconds();
  std::ostringstream d;
  d << "relative sup-norm branch gap = " << std::scientific << worst;
  report(2, "GEV-Gumbel continuity", worst <= 1e-9 && elapsed < 1.0, d.str(),
         elapsed);
}

// 3. difference of equal-scale Gumbels vs the predicted logistic
void check_gumbel_difference() {
  Timer timer;
  const Params gum{71.1, 12.5, 0.0};
  const RelVelModel predicted = gumbel_difference_model(gum, gum);
  const SimReport report_mc =
      mc_relvel(Family::gumbel, gum, Family::gumbel, gum,
                SimConfig{1000000, 301},
                [&](double x) { return predicted.cdf(x); });
  const double elapsed = timer.seconds();
  std::ostringstream d;
  d << "KS(1e6 draws, logistic) = " << std::scientific << *report_mc.ks_distance;
  report(3, "Gumbel-difference law", *report_mc.ks_distance <= 0.005 &&
                                         elapsed < 10.0,
         d.str(), elapsed);
}

// 4. Monte Carlo duration ECDF vs the analytic transform
void check_transform_oracle() {
  Timer timer;
  double worst = 0.0;
  const struct {
    Family family;
    double sigma;
  } models[] = {{Family::logistic, 7.95}, {Family::gaussian, 13.42}};
  for (const auto& m : models) {
    RelVelModel rel;
    rel.family = m.family;
    rel.params = {0.0, m.sigma, 0.0};
    rel.symmetric = true;
    const DurationDistribution analytic({100.0}, rel);
    const SimReport rep =
        mc_duration(rel, 100.0, SimConfig{1000000, 401},
                    [&](double t) { return analytic.cdf(t); });
    worst = std::max(worst, *rep.ks_distance);
  }
  const double elapsed = timer.seconds();
  std::ostringstream d;
  d << "max sup-norm = " << std::scientific << worst;
  report(4, "duration transform oracle", worst <= 0.005 && elapsed < 20.0,
         d.str(), elapsed);
}

// 5. connected-longer-than-80s probabilities at R = 100 m
void check_endpoints() {
  Timer timer;
  RelVelModel logi;
  logi.family = Family::logistic;
  logi.params = {0.0, 7.95, 0.0};
  logi.symmetric = true;
  RelVelModel gauss;
  gauss.family = Family::gaussian;
  gauss.params = {0.0, 13.42, 0.0};
  gauss.symmetric = true;

  const double p_logi =
      DurationDistribution({100.0}, logi).prob_connected_longer(80.0);
  const double p_gauss =
      DurationDistribution({100.0}, gauss).prob_connected_longer(80.0);

  const bool pass = std::abs(p_logi - 0.528) <= 0.025 &&
                    std::abs(p_gauss - 0.478) <= 0.025 && p_logi > p_gauss;
  std::ostringstream d;
  d << "logistic " << std::setprecision(4) << p_logi << " (target 0.528+-0.025), "
    << "gaussian " << p_gauss << " (target 0.478+-0.025), ordering "
    << (p_logi > p_gauss ? "holds" : "violated");
  report(5, "endpoint probabilities", pass, d.str(), timer.seconds());
}

// 6 + 7. fitting batch: rmse ordering and parameter recovery over 100 seeds
void check_fit_batch() {
  Timer timer;
  const Params gev_true{71.1, 12.5, -0.125};
  const Params gauss_true{76.9, 13.8, 0.0};
  int ordering_ok = 0;
  int recovery_ok = 0;
  const int runs = 100;
  for (int s = 0; s < runs; ++s) {
    const auto xs =
        sample(Family::gev, gev_true, 10000, 9000 + static_cast<std::uint64_t>(s));
    const FitResult gev_fit = fit_mle(xs, Family::gev);
    const FitResult gauss_on_gev = fit_mle(xs, Family::gaussian);
    if (gev_fit.rmse < gauss_on_gev.rmse) ++ordering_ok;

    const auto ys = sample(Family::gaussian, gauss_true, 10000,
                           77000 + static_cast<std::uint64_t>(s));
    const FitResult gauss_fit = fit_mle(ys, Family::gaussian);

    const bool gev_ok = std::abs(gev_fit.params.mu - gev_true.mu) <= 0.5 &&
                        std::abs(gev_fit.params.sigma - gev_true.sigma) <= 0.5 &&
                        std::abs(gev_fit.params.k - gev_true.k) <= 0.05;
    const bool gauss_ok =
        std::abs(gauss_fit.params.mu - gauss_true.mu) <= 0.5 &&
        std::abs(gauss_fit.params.sigma - gauss_true.sigma) <= 0.4;
    if (gev_ok && gauss_ok) ++recovery_ok;
  }
  const double elapsed = timer.seconds();
  {
    std::ostringstream d;
    d << "rmse(GEV) < rmse(Gaussian) in " << ordering_ok << "/" << runs
      << " runs";
    report(6, "model ordering on synthetic transition data",
           ordering_ok >= 95 && elapsed < 60.0, d.str(), elapsed);
  }
  {
    std::ostringstream d;
    d << "parameters recovered in " << recovery_ok << "/" << runs << " runs";
    report(7, "fit recovery", recovery_ok >= 95, d.str(), elapsed);
  }
}

// 8. dual-loop kinematics at the reference geometry
void check_kinematics() {
  Timer timer;
  const SensorGeometry geom;  // 6.096 m, 60 ticks/s
  const double v15 = compute_velocity({"S1", "1", 7200, 7215}, geom).velocity_kmh;
  const double v60 = compute_velocity({"S1", "1", 0, 60}, geom).velocity_kmh;
  const double v30 = compute_velocity({"S1", "1", 0, 30}, geom).velocity_kmh;

  // closed-form values up to decimal-literal rounding (2 ulp)
  const bool pass = std::abs(v15 - 87.7824) <= 2.0 * ulp_at(87.7824) &&
                    std::abs(v60 - 21.9456) <= 2.0 * ulp_at(21.9456) &&
                    v30 == 2.0 * v60;
  std::ostringstream d;
  d << std::setprecision(17) << "dt=15 -> " << v15 << " km/hr";
  report(8, "loop kinematics", pass, d.str(), timer.seconds());
}

// 9. end-to-end CLI pipeline, replayed bit-identically from manifests
struct PipelineFiles {
  std::vector<fs::path> outputs;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cmd(const std::string& args, const fs::path& log_dir, int step) {
  const fs::path log = log_dir / ("step" + std::to_string(step) + ".log");
  const std::string cmd = std::string(LINKLIFE_CLI_PATH) + " " + args + " > " +
                          log.string() + " 2>&1";
  return std::system(cmd.c_str());
}

void check_pipeline() {
  Timer timer;
  const fs::path dir =
      fs::temp_directory_path() /
      ("linklife_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string d = dir.string();

  bool pass = true;
  std::string detail = "all outputs reproduced bit-identically";

  const std::vector<std::string> steps = {
      "simulate trace --regime transition:gev:71.1:12.5:-0.125:1800:0.3:3600 "
      "--lanes 2 --seed 71 --out-dir " + d,
      "ingest " + d + "/trace.csv --out-dir " + d,
      "fit " + d + "/velocities.csv --families gaussian,gev --out-dir " + d,
      "relvel " + d + "/velocities.csv --out-dir " + d,
      "connectivity --model " + d + "/relvel.json --family logistic "
      "--range-m 100 --threshold-s 80 --threshold-s 160 --out-dir " + d,
  };
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (run_cmd(steps[i], dir, static_cast<int>(i)) != 0) {
      pass = false;
      detail = "step " + std::to_string(i) + " failed";
      break;
    }
  }

  if (pass) {
    // snapshot every produced file, then replay each manifest and compare
    std::vector<std::pair<fs::path, std::string>> snapshot;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".log") continue;
      snapshot.emplace_back(entry.path(), slurp(entry.path()));
    }
    const char* manifests[] = {
        "simulate_trace_manifest.json", "ingest_manifest.json",
        "fit_manifest.json", "relvel_manifest.json",
        "connectivity_manifest.json"};
    int step = 100;
    for (const char* m : manifests) {
      if (!fs::exists(dir / m)) {
        pass = false;
        detail = std::string("missing manifest ") + m;
        break;
      }
      if (run_cmd("replay " + (dir / m).string(), dir, step++) != 0) {
        pass = false;
        detail = std::string("replay failed for ") + m;
        break;
      }
    }
    if (pass) {
      for (const auto& [path, before] : snapshot) {
        if (slurp(path) != before) {
          pass = false;
          detail = "output changed after replay: " + path.filename().string();
          break;
        }
      }
    }
  }

  const double elapsed = timer.seconds();
  if (elapsed >= 60.0) pass = false;
  report(9, "end-to-end pipeline replay", pass, detail, elapsed);
  fs::remove_all(dir);
}

}  // namespace

int main() {
  std::cout << "acceptance suite\n----------------\n";
  check_normalization();
  check_gev_continuity();
  check_gumbel_difference();
  check_transform_oracle();
  check_endpoints();
  check_fit_batch();
  check_kinematics();
  check_pipeline();
  std::cout << "----------------\n"
            << (failures == 0 ? "all criteria passed"
                              : std::to_string(failures) + " criterion(s) failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
