// linklife command-line tool: trace ingestion, velocity-distribution fitting,
// relative-velocity modeling, link-duration analysis, and the seeded Monte
// Carlo oracle, all emitting plot-ready CSV/JSON plus a run manifest that
// reproduces outputs bit for bit.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "linklife/io.hpp"
#include "linklife/json_io.hpp"
#include "linklife/linklife.hpp"

namespace fs = std::filesystem;
using namespace linklife;

namespace {

constexpr const char* tool_version = "0.1.0";

struct GlobalOpts {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string format = "csv";  // csv | json
};

struct CommandContext {
  GlobalOpts global;
  std::vector<std::string> argv;  // full normalized argument list
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  json params = json::object();
};

int run_cli(const std::vector<std::string>& args);

// --- small helpers ----------------------------------------------------------

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path out_path(const CommandContext& ctx, const std::string& name) {
  return fs::path(ctx.global.out_dir) / name;
}

void emit(CommandContext& ctx, const std::string& name,
          const std::string& content) {
  const fs::path p = out_path(ctx, name);
  write_file(p, content);
  ctx.outputs.push_back(p.string());
}

void write_manifest(CommandContext& ctx, const std::string& command) {
  json m{{"tool", "linklife"},
         {"version", tool_version},
         {"command", command},
         {"argv", ctx.argv},
         {"seed", ctx.global.seed},
         {"inputs", ctx.inputs},
         {"outputs", ctx.outputs},
         {"params", ctx.params}};
  std::string name = command;
  for (char& c : name) {
    if (c == ' ') c = '_';
  }
  write_file(out_path(ctx, name + "_manifest.json"), m.dump(2) + "\n");
}

std::vector<Family> parse_family_list(const std::string& list) {
  std::vector<Family> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto fam = family_from_name(tok);
    if (!fam) throw CLI::ValidationError("--families", "unknown family '" + tok + "'");
    out.push_back(*fam);
  }
  if (out.empty()) throw CLI::ValidationError("--families", "empty family list");
  return out;
}

// --- velocity sample CSV ------------------------------------------------

constexpr const char* velocities_header = "time_s,lane_id,velocity_kmh";

std::string velocities_csv(const std::vector<VelocitySample>& samples) {
  std::string out(velocities_header);
  out += '\n';
  for (const VelocitySample& s : samples) {
    out += fmt_double(s.time_s);
    out += ',';
    out += s.lane_id;
    out += ',';
    out += fmt_double(s.velocity_kmh);
    out += '\n';
  }
  return out;
}

std::vector<VelocitySample> read_velocities(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<VelocitySample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (line_no == 1 || line == velocities_header) {
      if (line != velocities_header) {
        throw std::runtime_error(path.string() + ": expected header '" +
                                 velocities_header + "'");
      }
      continue;
    }
    std::stringstream ss(line);
    std::string t, lane, v;
    if (!std::getline(ss, t, ',') || !std::getline(ss, lane, ',') ||
        !std::getline(ss, v)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": malformed row");
    }
    samples.push_back({std::stod(t), lane, std::stod(v)});
  }
  return samples;
}

json rows_json(const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  json arr = json::array();
  for (const auto& row : rows) {
    json obj = json::object();
    for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = row[c];
    arr.push_back(std::move(obj));
  }
  return arr;
}

// --- model loading for connectivity / simulate duration ---------------------

RelVelModel load_rel_model(const std::string& model_file,
                           const std::string& family_name_opt,
                           CommandContext& ctx) {
  const json j = json::parse(read_file(model_file));
  ctx.inputs.push_back(model_file);
  if (j.contains("kind")) return rel_vel_model_from_json(j);
  if (j.contains("models")) {
    const auto& models = j.at("models");
    if (models.empty()) throw std::runtime_error("model bundle is empty");
    if (!family_name_opt.empty()) {
      for (const auto& entry : models) {
        if (entry.at("family") == family_name_opt) {
          return rel_vel_model_from_json(entry.at("model"));
        }
      }
      throw std::runtime_error("no model with family '" + family_name_opt +
                               "' in " + model_file);
    }
    return rel_vel_model_from_json(models.front().at("model"));
  }
  throw std::runtime_error(model_file +
                           ": not a relative-velocity model or model bundle");
}

RelVelModel inline_rel_model(const std::string& family, double mu, double sigma) {
  const auto fam = family_from_name(family);
  if (!fam || (*fam != Family::logistic && *fam != Family::gaussian)) {
    throw std::runtime_error("inline model family must be logistic or gaussian");
  }
  RelVelModel m;
  m.kind = RelVelModel::Kind::closed;
  m.family = *fam;
  m.params = {mu, sigma, 0.0};
  validate_params(m.family, m.params);
  m.symmetric = mu == 0.0;
  return m;
}

// --- ingest ------------------------------------------------------------------

struct IngestOpts {
  std::string trace_path;
  SensorGeometry geometry;
  std::string lane;
  bool skip_bad_rows = false;
};

int do_ingest(CommandContext& ctx, const IngestOpts& opt) {
  std::ifstream in(opt.trace_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << opt.trace_path << "\n";
    return 1;
  }
  ctx.inputs.push_back(opt.trace_path);
  const ParseResult parsed = parse_trace(in);
  for (const RowError& e : parsed.errors) {
    std::cerr << opt.trace_path << ":" << e.line << ": " << e.message << "\n";
  }
  if (!parsed.errors.empty() && !opt.skip_bad_rows) {
    std::cerr << "error: " << parsed.errors.size()
              << " rejected row(s); pass --skip-bad-rows to continue\n";
    return 1;
  }

  std::vector<VelocitySample> samples;
  for (const VehicleTransit& rec : parsed.records) {
    if (!opt.lane.empty() && rec.lane_id != opt.lane) continue;
    samples.push_back(compute_velocity(rec, opt.geometry));
  }
  if (samples.empty()) {
    std::cerr << "error: no samples\n";
    return 1;
  }

  const HourlySeries hourly = hourly_means(samples);

  if (ctx.global.format == "csv") {
    emit(ctx, "velocities.csv", velocities_csv(samples));
    std::string hs("hour,mean_kmh,count");
    hs += '\n';
    for (const HourlyStat& h : hourly) {
      hs += fmt_int(h.hour);
      hs += ',';
      hs += fmt_double(h.mean_kmh);
      hs += ',';
      hs += fmt_int(static_cast<std::int64_t>(h.count));
      hs += '\n';
    }
    emit(ctx, "hourly_means.csv", hs);
  } else {
    json vj = json::array();
    for (const VelocitySample& s : samples) {
      vj.push_back({{"time_s", s.time_s},
                    {"lane_id", s.lane_id},
                    {"velocity_kmh", s.velocity_kmh}});
    }
    emit(ctx, "velocities.json", vj.dump(2) + "\n");
    json hj = json::array();
    for (const HourlyStat& h : hourly) {
      hj.push_back({{"hour", h.hour},
                    {"mean_kmh", h.mean_kmh},
                    {"count", h.count}});
    }
    emit(ctx, "hourly_means.json", hj.dump(2) + "\n");
  }

  ctx.params = {{"trace", opt.trace_path},
                {"spacing_m", opt.geometry.loop_spacing_m},
                {"loop_length_m", opt.geometry.loop_length_m},
                {"tick_rate", opt.geometry.tick_rate_hz},
                {"lane", opt.lane},
                {"skip_bad_rows", opt.skip_bad_rows}};
  write_manifest(ctx, "ingest");
  std::cout << samples.size() << " velocity samples, " << hourly.size()
            << " hourly bins\n";
  return 0;
}

// --- fit -----------------------------------------------------------------

struct FitOpts {
  std::string velocities_path;
  int window_hour = -1;  // -1: all samples
  std::string lane;      // empty: pool all lanes
  std::string families = "gaussian,gev,lognormal";
  std::string method = "mle";
  int curve_points = 257;
};

std::vector<double> select_velocities(const fs::path& path, int window_hour,
                                      const std::string& lane,
                                      CommandContext& ctx,
                                      std::vector<VelocitySample>* keep = nullptr) {
  const auto samples = read_velocities(path);
  ctx.inputs.push_back(path.string());
  std::vector<double> xs;
  for (const VelocitySample& s : samples) {
    if (window_hour >= 0 &&
        static_cast<int>(std::floor(s.time_s / 3600.0)) != window_hour) {
      continue;
    }
    if (!lane.empty() && s.lane_id != lane) continue;
    xs.push_back(s.velocity_kmh);
    if (keep) keep->push_back(s);
  }
  return xs;
}

int do_fit(CommandContext& ctx, const FitOpts& opt) {
  const std::vector<double> xs =
      select_velocities(opt.velocities_path, opt.window_hour, opt.lane, ctx);
  if (xs.size() < 8) {
    std::cerr << "error: too few samples in selection (" << xs.size()
              << ", need >= 8)\n";
    return 1;
  }
  const std::vector<Family> families = parse_family_list(opt.families);
  const FitMethod method = opt.method == "cdfls" ? FitMethod::cdf_least_squares
                                                 : FitMethod::mle;

  const ModelRanking ranking = rank_models(xs, families, method);
  for (const FamilyFitError& f : ranking.failures) {
    std::cerr << "fit failed for " << family_name(f.family) << ": " << f.message
              << "\n";
  }
  if (ranking.ranked.empty()) {
    std::cerr << "error: no family could be fitted\n";
    return 1;
  }

  json jfits{{"n", static_cast<std::int64_t>(xs.size())},
             {"method", opt.method},
             {"ranking", json::array()},
             {"failures", json::array()}};
  if (opt.window_hour >= 0) jfits["window_hour"] = opt.window_hour;
  for (const FitResult& r : ranking.ranked) {
    jfits["ranking"].push_back(to_json(r));
  }
  for (const FamilyFitError& f : ranking.failures) {
    jfits["failures"].push_back(
        {{"family", family_name(f.family)}, {"error", f.message}});
  }
  emit(ctx, "fits.json", jfits.dump(2) + "\n");

  // model-vs-empirical CDF curves on a uniform grid over the sample range
  const EmpiricalCdf ecdf(xs);
  std::vector<std::string> columns{"x", "F_empirical"};
  for (const FitResult& r : ranking.ranked) {
    columns.push_back(family_name(r.family));
  }
  std::vector<std::vector<double>> rows;
  const int np = std::max(2, opt.curve_points);
  for (int i = 0; i < np; ++i) {
    const double x = ecdf.min() + (ecdf.max() - ecdf.min()) *
                                      static_cast<double>(i) /
                                      static_cast<double>(np - 1);
    std::vector<double> row{x, ecdf(x)};
    for (const FitResult& r : ranking.ranked) {
      row.push_back(cdf(r.family, r.params, x));
    }
    rows.push_back(std::move(row));
  }
  if (ctx.global.format == "csv") {
    std::string csv;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      csv += (c ? "," : "") + columns[c];
    }
    csv += '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        csv += (c ? "," : "") + fmt_double(row[c]);
      }
      csv += '\n';
    }
    emit(ctx, "cdf_curves.csv", csv);
  } else {
    emit(ctx, "cdf_curves.json", rows_json(columns, rows).dump(2) + "\n");
  }

  ctx.params = {{"velocities", opt.velocities_path},
                {"window_hour", opt.window_hour},
                {"families", opt.families},
                {"method", opt.method},
                {"curve_points", opt.curve_points}};
  write_manifest(ctx, "fit");

  std::cout << "ranking (" << xs.size() << " samples):\n";
  for (const FitResult& r : ranking.ranked) {
    std::cout << "  " << family_name(r.family) << " rmse=" << fmt_double(r.rmse)
              << (r.converged ? "" : " (not converged)") << "\n";
  }
  return 0;
}

// --- relvel ---------------------------------------------------------------

struct RelVelOpts {
  std::string velocities_path;
  int window_hour = -1;
  std::string lane;
  std::string families = "logistic,gaussian";
};

int do_relvel(CommandContext& ctx, const RelVelOpts& opt) {
  std::vector<VelocitySample> samples;
  select_velocities(opt.velocities_path, opt.window_hour, opt.lane, ctx,
                    &samples);
  const std::vector<double> diffs = consecutive_differences(samples);
  if (diffs.size() < 8) {
    std::cerr << "error: too few velocity differences (" << diffs.size()
              << ", need >= 8)\n";
    return 1;
  }

  const std::vector<Family> families = parse_family_list(opt.families);
  json jmodels = json::array();
  std::vector<RelVelFit> fits;
  for (Family f : families) {
    RelVelFit rf = fit_relvel(diffs, f);
    jmodels.push_back({{"family", family_name(f)},
                       {"model", to_json(rf.model)},
                       {"fit", to_json(rf.fit)}});
    fits.push_back(std::move(rf));
  }
  json out{{"n_differences", static_cast<std::int64_t>(diffs.size())},
           {"models", std::move(jmodels)}};
  emit(ctx, "relvel.json", out.dump(2) + "\n");

  const EmpiricalCdf ecdf(diffs);
  std::vector<std::string> columns{"x", "F_empirical"};
  for (const RelVelFit& rf : fits) columns.push_back(family_name(rf.model.family));
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 257; ++i) {
    const double x = ecdf.min() + (ecdf.max() - ecdf.min()) *
                                      static_cast<double>(i) / 256.0;
    std::vector<double> row{x, ecdf(x)};
    for (const RelVelFit& rf : fits) row.push_back(rf.model.cdf(x));
    rows.push_back(std::move(row));
  }
  if (ctx.global.format == "csv") {
    std::string csv;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      csv += (c ? "," : "") + columns[c];
    }
    csv += '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        csv += (c ? "," : "") + fmt_double(row[c]);
      }
      csv += '\n';
    }
    emit(ctx, "relvel_curves.csv", csv);
  } else {
    emit(ctx, "relvel_curves.json", rows_json(columns, rows).dump(2) + "\n");
  }

  ctx.params = {{"velocities", opt.velocities_path},
                {"window_hour", opt.window_hour},
                {"lane", opt.lane},
                {"families", opt.families}};
  write_manifest(ctx, "relvel");

  std::cout << diffs.size() << " differences";
  for (const RelVelFit& rf : fits) {
    std::cout << "; " << family_name(rf.model.family)
              << " rmse=" << fmt_double(rf.fit.rmse);
  }
  std::cout << "\n";
  return 0;
}

// --- connectivity ----------------------------------------------------------

struct ConnectivityOpts {
  std::string model_file;
  std::string family;  // picks a bundle entry, or names the inline family
  double mu = 0.0;
  double sigma = 0.0;
  double range_m = 100.0;
  std::vector<double> thresholds_s;
  std::string grid = "1:400:400";
};

std::vector<double> parse_grid_spec(const std::string& spec) {
  double lo = 0.0, hi = 0.0;
  int n = 0;
  char c1 = 0, c2 = 0;
  std::stringstream ss(spec);
  if (!(ss >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 2 ||
      !(lo > 0.0) || !(hi > lo)) {
    throw std::runtime_error("bad --grid spec '" + spec + "' (want lo:hi:n)");
  }
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    grid[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return grid;
}

int do_connectivity(CommandContext& ctx, const ConnectivityOpts& opt) {
  RelVelModel model;
  try {
    if (!opt.model_file.empty()) {
      model = load_rel_model(opt.model_file, opt.family, ctx);
    } else if (!opt.family.empty() && opt.sigma > 0.0) {
      model = inline_rel_model(opt.family, opt.mu, opt.sigma);
    } else {
      std::cerr << "error: provide --model FILE or --family with --sigma\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const DurationDistribution dist({opt.range_m}, model);
  const std::vector<double> grid = parse_grid_spec(opt.grid);
  const auto curve = emit_duration_curve(dist, grid);

  if (ctx.global.format == "csv") {
    std::string csv("t_seconds,pdf_per_second,cdf");
    csv += '\n';
    for (const DurationPoint& p : curve) {
      csv += fmt_double(p.t_s);
      csv += ',';
      csv += fmt_double(p.pdf_per_s);
      csv += ',';
      csv += fmt_double(p.cdf);
      csv += '\n';
    }
    emit(ctx, "duration_curve.csv", csv);
  } else {
    std::vector<std::vector<double>> rows;
    for (const DurationPoint& p : curve) rows.push_back({p.t_s, p.pdf_per_s, p.cdf});
    emit(ctx, "duration_curve.json",
         rows_json({"t_seconds", "pdf_per_second", "cdf"}, rows).dump(2) + "\n");
  }

  std::vector<double> thresholds = opt.thresholds_s;
  if (thresholds.empty()) thresholds.push_back(80.0);
  json jthr = json::array();
  for (double t : thresholds) {
    jthr.push_back({{"t", t}, {"p_longer", dist.prob_connected_longer(t)}});
  }
  json summary{{"R_meters", opt.range_m},
               {"model", to_json(model)},
               {"thresholds", std::move(jthr)}};
  emit(ctx, "connectivity.json", summary.dump(2) + "\n");

  ctx.params = {{"model_file", opt.model_file}, {"family", opt.family},
                {"mu", opt.mu},                 {"sigma", opt.sigma},
                {"range_m", opt.range_m},       {"grid", opt.grid}};
  write_manifest(ctx, "connectivity");

  for (double t : thresholds) {
    std::cout << "P(T > " << fmt_double(t)
              << " s) = " << fmt_double(dist.prob_connected_longer(t)) << "\n";
  }
  return 0;
}

// --- simulate ---------------------------------------------------------------

struct SimFamilyOpts {
  std::string family = "gumbel";
  double mu = 0.0;
  double sigma = 1.0;
  double k = 0.0;
};

std::pair<Family, Params> resolve_family(const SimFamilyOpts& o) {
  const auto fam = family_from_name(o.family);
  if (!fam) throw std::runtime_error("unknown family '" + o.family + "'");
  Params p{o.mu, o.sigma, o.k};
  validate_params(*fam, p);
  return {*fam, p};
}

int do_simulate_relvel(CommandContext& ctx, const SimFamilyOpts& a,
                       const SimFamilyOpts& b, std::int64_t draws,
                       std::int64_t chunk_size) {
  const auto [fam_a, par_a] = resolve_family(a);
  const auto [fam_b, par_b] = resolve_family(b);

  // the Gumbel-pair case has a closed-form prediction to score against
  ReferenceCdf ref;
  json ref_desc;
  if (fam_a == Family::gumbel && fam_b == Family::gumbel &&
      std::abs(par_a.sigma - par_b.sigma) <=
          1e-9 * std::max(par_a.sigma, par_b.sigma)) {
    const RelVelModel predicted = gumbel_difference_model(par_a, par_b);
    ref = [predicted](double x) { return predicted.cdf(x); };
    ref_desc = to_json(predicted);
  }

  const SimConfig cfg{draws, ctx.global.seed, chunk_size};
  const SimReport report = mc_relvel(fam_a, par_a, fam_b, par_b, cfg, ref);
  json j = to_json(report);
  if (!ref_desc.is_null()) j["reference"] = ref_desc;
  emit(ctx, "simulate_relvel.json", j.dump(2) + "\n");

  ctx.params = {{"family_a", a.family}, {"mu_a", a.mu},
                {"sigma_a", a.sigma},   {"k_a", a.k},
                {"family_b", b.family}, {"mu_b", b.mu},
                {"sigma_b", b.sigma},   {"k_b", b.k},
                {"draws", draws},       {"chunk_size", chunk_size}};
  write_manifest(ctx, "simulate relvel");
  if (report.ks_distance) {
    std::cout << "ks_distance = " << fmt_double(*report.ks_distance) << "\n";
  } else {
    std::cout << draws << " draws\n";
  }
  return 0;
}

int do_simulate_duration(CommandContext& ctx, const ConnectivityOpts& model_opt,
                         std::int64_t draws, std::int64_t chunk_size) {
  RelVelModel model;
  try {
    if (!model_opt.model_file.empty()) {
      model = load_rel_model(model_opt.model_file, model_opt.family, ctx);
    } else if (!model_opt.family.empty() && model_opt.sigma > 0.0) {
      model = inline_rel_model(model_opt.family, model_opt.mu, model_opt.sigma);
    } else {
      std::cerr << "error: provide --model FILE or --family with --sigma\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const DurationDistribution analytic({model_opt.range_m}, model);
  const SimConfig cfg{draws, ctx.global.seed, chunk_size};
  const SimReport report =
      mc_duration(model, model_opt.range_m, cfg,
                  [&](double t) { return analytic.cdf(t); });
  json j = to_json(report);
  j["R_meters"] = model_opt.range_m;
  j["model"] = to_json(model);
  emit(ctx, "simulate_duration.json", j.dump(2) + "\n");

  ctx.params = {{"model_file", model_opt.model_file},
                {"family", model_opt.family},
                {"mu", model_opt.mu},
                {"sigma", model_opt.sigma},
                {"range_m", model_opt.range_m},
                {"draws", draws},
                {"chunk_size", chunk_size}};
  write_manifest(ctx, "simulate duration");
  if (report.ks_distance) {
    std::cout << "ks_distance = " << fmt_double(*report.ks_distance) << "\n";
  }
  return 0;
}

// label:family:mu:sigma[:k]:flow_vph:rho:duration_s  (k may be empty)
RegimeSpec parse_regime_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.size() != 8) {
    throw std::runtime_error("bad --regime '" + spec +
                             "' (want label:family:mu:sigma:k:flow:rho:duration)");
  }
  RegimeSpec r;
  const auto label = regime_label_from_name(parts[0]);
  if (!label) throw std::runtime_error("unknown regime label '" + parts[0] + "'");
  r.label = *label;
  const auto fam = family_from_name(parts[1]);
  if (!fam) throw std::runtime_error("unknown family '" + parts[1] + "'");
  r.velocity_family = *fam;
  r.velocity_params.mu = std::stod(parts[2]);
  r.velocity_params.sigma = std::stod(parts[3]);
  r.velocity_params.k = parts[4].empty() ? 0.0 : std::stod(parts[4]);
  r.flow_rate_vph = std::stod(parts[5]);
  r.consec_correlation = std::stod(parts[6]);
  r.duration_s = std::stod(parts[7]);
  return r;
}

int do_simulate_trace(CommandContext& ctx,
                      const std::vector<std::string>& regime_specs, int lanes,
                      const std::string& station, const SensorGeometry& geom) {
  TraceConfig cfg;
  cfg.geometry = geom;
  cfg.lanes = lanes;
  cfg.station_id = station;
  for (const std::string& spec : regime_specs) {
    cfg.regimes.push_back(parse_regime_spec(spec));
  }
  const std::string trace = synth_trace(cfg, ctx.global.seed);
  emit(ctx, "trace.csv", trace);

  ctx.params = {{"regimes", regime_specs},
                {"lanes", lanes},
                {"station", station},
                {"spacing_m", geom.loop_spacing_m},
                {"loop_length_m", geom.loop_length_m},
                {"tick_rate", geom.tick_rate_hz}};
  write_manifest(ctx, "simulate trace");
  std::cout << std::count(trace.begin(), trace.end(), '\n') - 1 << " rows\n";
  return 0;
}

// --- replay -------------------------------------------------------------

int do_replay(const std::string& manifest_path) {
  const json m = json::parse(read_file(manifest_path));
  std::vector<std::string> argv;
  for (const auto& a : m.at("argv")) argv.push_back(a.get<std::string>());
  return run_cli(argv);
}

// --- dispatcher ----------------------------------------------------------

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"traffic velocity distributions and VANET link-duration analysis"};
  app.set_version_flag("--version", tool_version);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts global;
  app.add_option("--seed", global.seed, "random seed for seeded commands");
  app.add_option("--out-dir", global.out_dir, "output directory");
  app.add_option("--format", global.format, "tabular output format")
      ->check(CLI::IsMember({"csv", "json"}));

  // ingest
  IngestOpts ingest_opt;
  CLI::App* c_ingest = app.add_subcommand("ingest", "trace CSV -> velocity samples");
  c_ingest->add_option("trace", ingest_opt.trace_path, "trace CSV file")->required();
  c_ingest->add_option("--spacing-m", ingest_opt.geometry.loop_spacing_m,
                       "loop center spacing, meters");
  c_ingest->add_option("--loop-length-m", ingest_opt.geometry.loop_length_m,
                       "loop length, meters");
  c_ingest->add_option("--tick-rate", ingest_opt.geometry.tick_rate_hz,
                       "timestamp clock, ticks per second");
  c_ingest->add_option("--lane", ingest_opt.lane, "keep only this lane");
  c_ingest->add_flag("--skip-bad-rows", ingest_opt.skip_bad_rows,
                     "continue past malformed rows");

  // fit
  FitOpts fit_opt;
  CLI::App* c_fit = app.add_subcommand("fit", "fit velocity distributions");
  c_fit->add_option("velocities", fit_opt.velocities_path, "velocities CSV")
      ->required();
  c_fit->add_option("--window-hour", fit_opt.window_hour, "restrict to hour 0-23");
  c_fit->add_option("--families", fit_opt.families, "comma-separated family list");
  c_fit->add_option("--method", fit_opt.method, "fitting method")
      ->check(CLI::IsMember({"mle", "cdfls"}));
  c_fit->add_option("--curve-points", fit_opt.curve_points, "CDF curve grid size");

  // relvel
  RelVelOpts rv_opt;
  CLI::App* c_relvel =
      app.add_subcommand("relvel", "consecutive-vehicle velocity differences");
  c_relvel->add_option("velocities", rv_opt.velocities_path, "velocities CSV")
      ->required();
  c_relvel->add_option("--window-hour", rv_opt.window_hour, "restrict to hour 0-23");
  c_relvel->add_option("--lane", rv_opt.lane, "keep only this lane");
  c_relvel->add_option("--families", rv_opt.families,
                       "difference families (logistic,gaussian)");

  // connectivity
  ConnectivityOpts conn_opt;
  CLI::App* c_conn =
      app.add_subcommand("connectivity", "link-duration distribution");
  c_conn->add_option("--model", conn_opt.model_file,
                     "relative-velocity model JSON (model or relvel bundle)");
  c_conn->add_option("--family", conn_opt.family,
                     "bundle entry or inline family (logistic|gaussian)");
  c_conn->add_option("--mu", conn_opt.mu, "inline model location, km/hr");
  c_conn->add_option("--sigma", conn_opt.sigma, "inline model scale, km/hr");
  c_conn->add_option("--range-m", conn_opt.range_m, "communication range, meters");
  c_conn->add_option("--threshold-s", conn_opt.thresholds_s,
                     "report P(T > threshold) for each value");
  c_conn->add_option("--grid", conn_opt.grid, "duration curve grid lo:hi:n");

  // simulate
  CLI::App* c_sim = app.add_subcommand("simulate", "seeded Monte Carlo oracle");
  c_sim->require_subcommand(1);
  c_sim->fallthrough();

  SimFamilyOpts sim_a, sim_b;
  std::int64_t sim_draws = 1000000;
  std::int64_t sim_chunk = detail::default_chunk_size;
  CLI::App* c_sim_rv =
      c_sim->add_subcommand("relvel", "pairwise difference of two families");
  c_sim_rv->add_option("--family-a", sim_a.family);
  c_sim_rv->add_option("--mu-a", sim_a.mu);
  c_sim_rv->add_option("--sigma-a", sim_a.sigma);
  c_sim_rv->add_option("--k-a", sim_a.k);
  c_sim_rv->add_option("--family-b", sim_b.family);
  c_sim_rv->add_option("--mu-b", sim_b.mu);
  c_sim_rv->add_option("--sigma-b", sim_b.sigma);
  c_sim_rv->add_option("--k-b", sim_b.k);
  c_sim_rv->add_option("--draws", sim_draws);
  c_sim_rv->add_option("--chunk-size", sim_chunk);

  ConnectivityOpts sim_dur_opt;
  std::int64_t sim_dur_draws = 1000000;
  std::int64_t sim_dur_chunk = detail::default_chunk_size;
  CLI::App* c_sim_dur =
      c_sim->add_subcommand("duration", "T = 2R/|dv| against the closed form");
  c_sim_dur->add_option("--model", sim_dur_opt.model_file);
  c_sim_dur->add_option("--family", sim_dur_opt.family);
  c_sim_dur->add_option("--mu", sim_dur_opt.mu);
  c_sim_dur->add_option("--sigma", sim_dur_opt.sigma);
  c_sim_dur->add_option("--range-m", sim_dur_opt.range_m);
  c_sim_dur->add_option("--draws", sim_dur_draws);
  c_sim_dur->add_option("--chunk-size", sim_dur_chunk);

  std::vector<std::string> regime_specs;
  int trace_lanes = 1;
  std::string trace_station = "S1";
  SensorGeometry trace_geom;
  CLI::App* c_sim_trace =
      c_sim->add_subcommand("trace", "synthetic vehicle transit trace");
  c_sim_trace
      ->add_option("--regime", regime_specs,
                   "label:family:mu:sigma:k:flow:rho:duration (repeatable)")
      ->required();
  c_sim_trace->add_option("--lanes", trace_lanes);
  c_sim_trace->add_option("--station", trace_station);
  c_sim_trace->add_option("--spacing-m", trace_geom.loop_spacing_m);
  c_sim_trace->add_option("--loop-length-m", trace_geom.loop_length_m);
  c_sim_trace->add_option("--tick-rate", trace_geom.tick_rate_hz);

  // replay
  std::string manifest_path;
  CLI::App* c_replay =
      app.add_subcommand("replay", "re-run a command from its manifest");
  c_replay->add_option("manifest", manifest_path, "manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CommandContext ctx;
  ctx.global = global;
  ctx.argv = args;

  try {
    if (*c_ingest) return do_ingest(ctx, ingest_opt);
    if (*c_fit) return do_fit(ctx, fit_opt);
    if (*c_relvel) return do_relvel(ctx, rv_opt);
    if (*c_conn) return do_connectivity(ctx, conn_opt);
    if (*c_sim_rv) return do_simulate_relvel(ctx, sim_a, sim_b, sim_draws, sim_chunk);
    if (*c_sim_dur)
      return do_simulate_duration(ctx, sim_dur_opt, sim_dur_draws, sim_dur_chunk);
    if (*c_sim_trace)
      return do_simulate_trace(ctx, regime_specs, trace_lanes, trace_station,
                               trace_geom);
    if (*c_replay) return do_replay(manifest_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}
