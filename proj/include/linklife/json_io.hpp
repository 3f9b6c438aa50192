#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "linklife/fit.hpp"
#include "linklife/relvel.hpp"
#include "linklife/simulate.hpp"

namespace linklife {

using json = nlohmann::json;

inline json to_json(const FitResult& r) {
  json j{{"family", family_name(r.family)},
         {"mu", r.params.mu},
         {"sigma", r.params.sigma},
         {"log_likelihood", r.log_likelihood},
         {"rmse", r.rmse},
         {"n", r.n},
         {"converged", r.converged}};
  if (r.family == Family::gev) j["k"] = r.params.k;
  return j;
}

inline FitResult fit_result_from_json(const json& j) {
  FitResult r;
  const auto fam = family_from_name(j.at("family").get<std::string>());
  if (!fam) throw std::invalid_argument("unknown family in fit JSON");
  r.family = *fam;
  r.params.mu = j.at("mu").get<double>();
  r.params.sigma = j.at("sigma").get<double>();
  r.params.k = j.value("k", 0.0);
  r.log_likelihood = j.at("log_likelihood").get<double>();
  r.rmse = j.at("rmse").get<double>();
  r.n = j.at("n").get<std::int64_t>();
  r.converged = j.at("converged").get<bool>();
  return r;
}

inline json to_json(const RelVelModel& m) {
  json j;
  if (m.kind == RelVelModel::Kind::closed) {
    j["kind"] = "closed";
    j["family"] = family_name(m.family);
    j["mu"] = m.params.mu;
    j["sigma"] = m.params.sigma;
  } else {
    j["kind"] = "grid";
    json grid = json::array();
    for (std::size_t i = 0; i < m.grid_x.size(); ++i) {
      grid.push_back({m.grid_x[i], m.grid_pdf[i]});
    }
    j["grid"] = std::move(grid);
  }
  j["symmetric"] = m.symmetric;
  return j;
}

inline RelVelModel rel_vel_model_from_json(const json& j) {
  RelVelModel m;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "closed") {
    m.kind = RelVelModel::Kind::closed;
    const auto fam = family_from_name(j.at("family").get<std::string>());
    if (!fam || (*fam != Family::logistic && *fam != Family::gaussian)) {
      throw std::invalid_argument("closed RelVelModel must be logistic or gaussian");
    }
    m.family = *fam;
    m.params.mu = j.at("mu").get<double>();
    m.params.sigma = j.at("sigma").get<double>();
    validate_params(m.family, m.params);
  } else if (kind == "grid") {
    m.kind = RelVelModel::Kind::grid;
    for (const auto& pair : j.at("grid")) {
      if (!pair.is_array() || pair.size() != 2) {
        throw std::invalid_argument("grid entries must be [x, density] pairs");
      }
      m.grid_x.push_back(pair[0].get<double>());
      m.grid_pdf.push_back(pair[1].get<double>());
    }
    if (m.grid_x.size() < 2) {
      throw std::invalid_argument("grid RelVelModel needs at least 2 points");
    }
    for (std::size_t i = 1; i < m.grid_x.size(); ++i) {
      if (m.grid_x[i] < m.grid_x[i - 1]) {
        throw std::invalid_argument("grid x values must be ascending");
      }
    }
    // Rebuild the cumulative table; tolerate small quantization drift in the
    // serialized density by renormalizing.
    m.grid_cdf.assign(m.grid_x.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 1; i < m.grid_x.size(); ++i) {
      acc += 0.5 * (m.grid_pdf[i - 1] + m.grid_pdf[i]) *
             (m.grid_x[i] - m.grid_x[i - 1]);
      m.grid_cdf[i] = acc;
    }
    if (acc <= 0.0) throw std::invalid_argument("grid density integrates to zero");
    for (std::size_t i = 0; i < m.grid_cdf.size(); ++i) m.grid_cdf[i] /= acc;
    for (double& g : m.grid_pdf) g /= acc;
  } else {
    throw std::invalid_argument("RelVelModel kind must be 'closed' or 'grid'");
  }
  m.symmetric = j.value("symmetric", false);
  return m;
}

inline json to_json(const SimReport& r) {
  json j{{"n", r.n}, {"seed", r.seed}, {"censored_tail", r.censored_tail}};
  if (r.ks_distance) j["ks_distance"] = *r.ks_distance;
  json grid = json::array();
  for (const auto& [x, f] : r.ecdf_grid()) grid.push_back({x, f});
  j["ecdf_grid"] = std::move(grid);
  return j;
}

}  // namespace linklife
