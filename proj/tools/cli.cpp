#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "convexreach/certificates.hpp"
#include "convexreach/criterion.hpp"
#include "convexreach/errors.hpp"
#include "convexreach/io.hpp"
#include "convexreach/parallel.hpp"
#include "convexreach/polyapprox.hpp"

namespace convexreach::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError("empty number");
  const auto pi = s.find("pi");
  try {
    if (pi == std::string::npos) {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw ConfigError("malformed number '" + s + "'");
      return v;
    }
    double factor = 1.0;
    double divisor = 1.0;
    const std::string before = trim(s.substr(0, pi));
    const std::string after = trim(s.substr(pi + 2));
    if (!before.empty()) {
      if (before.back() != '*') throw ConfigError("malformed number '" + s + "'");
      factor = parse_number(before.substr(0, before.size() - 1));
    }
    if (!after.empty()) {
      if (after.front() != '/') throw ConfigError("malformed number '" + s + "'");
      divisor = parse_number(after.substr(1));
    }
    return factor * std::numbers::pi / divisor;
  } catch (const std::logic_error&) {
    throw ConfigError("malformed number '" + s + "'");
  }
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  const std::string s = trim(spec);
  if (s.empty()) throw ConfigError("empty grid");
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw ConfigError("range grid must be start:stop:count");
    const double a = parse_number(parts[0]);
    const double b = parse_number(parts[1]);
    const double count = parse_number(parts[2]);
    if (count < 1 || count != std::floor(count)) throw ConfigError("grid count must be >= 1");
    const int n = static_cast<int>(count);
    for (int k = 0; k < n; ++k) {
      grid.push_back(k == 0 ? a : k == n - 1 ? b : a + (b - a) * k / (n - 1));
    }
    return grid;
  }
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');) grid.push_back(parse_number(part));
  return grid;
}

ModelSpec parse_model_file(std::istream& in) {
  ModelSpec spec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("model file line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("model file line " + std::to_string(lineno) + ": empty key or value");
    }
    if (key == "preset") {
      spec.preset = value;
    } else {
      spec.overrides[key] = parse_number(value);
    }
  }
  if (spec.preset.empty()) throw ConfigError("model file does not name a preset");
  return spec;
}

Matrix parse_metric_file(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::stringstream ss(line);
    std::vector<double> row;
    for (std::string tok; ss >> tok;) row.push_back(parse_number(tok));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("metric file is empty");
  const std::size_t n = rows.size();
  Matrix q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw ConfigError("metric file must hold a square matrix");
    for (std::size_t j = 0; j < n; ++j) {
      q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return q;
}

namespace {

struct RunConfig {
  std::string preset = "pendulum";
  std::string model_file;
  std::optional<double> omega;
  std::optional<double> gamma;
  std::vector<std::string> params;
  std::string metric_file;
  double t0 = 0.0;
  std::optional<double> t1;
  std::optional<std::string> t_grid;
  std::optional<double> radius;
  std::string r_grid;
  std::vector<double> bracket;
  std::vector<double> center;
  double tol = 1e-10;
  double tol_r = 1e-4;
  int angles = 256;
  int n = 128;
  std::string certificate;
  bool unsound = false;
  bool numerical = false;
  std::string out;
  int jobs = default_jobs();
  bool svg = false;
};

struct Setup {
  std::string preset;
  ParameterMap params;
  VectorFieldModel model;
  MetricSpace metric;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Setup make_setup(const RunConfig& cfg, const PresetRegistry& registry) {
  std::string preset = cfg.preset;
  ParameterMap overrides;
  if (!cfg.model_file.empty()) {
    std::istringstream in(read_file(cfg.model_file));
    ModelSpec spec = parse_model_file(in);
    preset = spec.preset;
    overrides = std::move(spec.overrides);
  }
  if (cfg.omega) overrides["omega"] = *cfg.omega;
  if (cfg.gamma) overrides["gamma"] = *cfg.gamma;
  for (const std::string& kv : cfg.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--param expects key=value, got '" + kv + "'");
    overrides[trim(kv.substr(0, eq))] = parse_number(kv.substr(eq + 1));
  }
  ParameterMap params;
  VectorFieldModel model;
  try {
    params = registry.resolve(preset, overrides);
    model = registry.build(preset, overrides);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(e.what());
  }
  std::optional<MetricSpace> metric;
  if (!cfg.metric_file.empty()) {
    std::istringstream in(read_file(cfg.metric_file));
    try {
      metric.emplace(parse_metric_file(in));
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("metric file: ") + e.what());
    }
    if (metric->dim() != model.dim) throw ConfigError("metric dimension does not match the model");
  } else {
    metric.emplace(model.dim);
  }
  return Setup{preset, params, std::move(model), *metric};
}

Vector center_for(const RunConfig& cfg, const Setup& s, const PresetRegistry& registry, double r) {
  if (!cfg.center.empty()) {
    if (static_cast<int>(cfg.center.size()) != s.model.dim) {
      throw ConfigError("--center has the wrong dimension");
    }
    return Eigen::Map<const Vector>(cfg.center.data(), static_cast<Eigen::Index>(cfg.center.size()));
  }
  return registry.center(s.preset, s.params, r);
}

SamplerConfig sampler_for(const RunConfig& cfg) {
  SamplerConfig sc;
  sc.angles = cfg.angles;
  sc.integrator.tol = cfg.tol;
  sc.jobs = cfg.jobs;
  return sc;
}

std::vector<double> time_grid(const RunConfig& cfg) {
  std::vector<double> grid;
  if (cfg.t_grid) {
    grid = parse_grid(*cfg.t_grid);
  } else if (cfg.t1) {
    grid.push_back(*cfg.t1);
  }
  if (grid.empty()) throw ConfigError("empty t-grid (use --t1 or --t-grid)");
  for (double t : grid) {
    if (!std::isfinite(t)) throw ConfigError("non-finite t-grid entry");
  }
  return grid;
}

double require_t1(const RunConfig& cfg) {
  if (!cfg.t1) throw ConfigError("--t1 is required");
  return *cfg.t1;
}

double require_radius(const RunConfig& cfg) {
  if (!cfg.radius) throw ConfigError("--radius is required");
  if (!(*cfg.radius >= 0.0)) throw ConfigError("--radius must be >= 0");
  return *cfg.radius;
}

void validate(const RunConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw ConfigError("--tol must be positive");
  if (!(cfg.tol_r > 0.0)) throw ConfigError("--tol-r must be positive");
  if (cfg.jobs < 1) throw ConfigError("--jobs must be >= 1");
  if (cfg.angles < 3) throw ConfigError("--angles must be >= 3");
  if (cfg.n < 3) throw ConfigError("--n must be >= 3");
}

fs::path output_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + cfg.out + "'");
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
}

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::certified_convex:
      return exit_ok;
    case Verdict::certified_non_convex:
      return exit_non_convex;
    case Verdict::inconclusive:
      break;
  }
  return exit_inconclusive;
}

int cmd_bounds(const RunConfig& cfg, const PresetRegistry& registry, std::ostream& out,
               std::ostream& err) {
  validate(cfg);
  const std::vector<double> grid = time_grid(cfg);
  const Setup s = make_setup(cfg, registry);
  const bool pendulum = s.model.name == "pendulum";
  const std::size_t rows = grid.size();

  BoundsTable table;
  table.t1 = grid;
  auto cell = [&](BoundColumn& col, std::size_t i, auto&& fn) {
    try {
      col.values[i] = fn(grid[i]);
    } catch (const Error& e) {
      err << "warning: " << col.name << " at t1=" << format_double(grid[i]) << ": " << e.what()
          << '\n';
    }
  };
  auto column = [&](const std::string& name) {
    table.columns.push_back({name, std::vector<std::optional<double>>(rows)});
    return table.columns.size() - 1;
  };

  if (pendulum) {
    const PendulumParams pp{s.params.at("omega"), s.params.at("gamma")};
    const std::size_t a = column("pendulum_A");
    for (std::size_t i = 0; i < rows; ++i) {
      cell(table.columns[a], i, [&](double t) { return pendulum_bound_A(pp, t - cfg.t0); });
    }
    const std::size_t b = column("pendulum_B");
    for (std::size_t i = 0; i < rows; ++i) {
      if (!pendulum_bound_B_violation(pp, grid[i] - cfg.t0)) {
        cell(table.columns[b], i, [&](double t) { return pendulum_bound_B(pp, t - cfg.t0); });
      }
    }
  }
  if (s.model.sup_jacobian_norm) {
    const std::size_t l = column("lojasiewicz");
    for (std::size_t i = 0; i < rows; ++i) {
      cell(table.columns[l], i, [&](double t) {
        return lojasiewicz_bound(*s.model.sup_jacobian_norm, s.model.m2, cfg.t0, t);
      });
    }
  }
  const std::size_t m = column("main_theorem");
  for (std::size_t i = 0; i < rows; ++i) {
    cell(table.columns[m], i,
         [&](double t) { return radius_bound(BoundInputs::from_model(s.model, cfg.t0, t)); });
  }
  if (cfg.numerical) {
    const std::size_t k = column("numerical");
    SamplerConfig sc = sampler_for(cfg);
    sc.jobs = 1;
    std::vector<std::string> failures(rows);
    parallel_for(rows, cfg.jobs, [&](std::size_t i) {
      const double t = grid[i];
      double guess = 0.0;
      for (const BoundColumn& c : table.columns) {
        if (c.name != "numerical" && c.values[i]) guess = std::max(guess, *c.values[i]);
      }
      if (!(guess > 0.0)) guess = 1.0;
      try {
        const Vector x0 = center_for(cfg, s, registry, guess);
        const RadiusSearchResult r =
            cfg.bracket.size() == 2
                ? numerical_radius(s.model, s.metric, x0, cfg.t0, t, cfg.bracket[0],
                                   cfg.bracket[1], cfg.tol_r, sc)
                : numerical_radius_from_guess(s.model, s.metric, x0, cfg.t0, t, guess,
                                              cfg.tol_r, sc);
        table.columns[k].values[i] = r.radius;
        if (r.unbounded_within_bracket) failures[i] = "no non-convex radius found";
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < rows; ++i) {
      if (!failures[i].empty()) {
        err << "warning: numerical at t1=" << format_double(grid[i]) << ": " << failures[i]
            << '\n';
      }
    }
  }

  std::ostringstream csv;
  write_bounds_table_csv(csv, table);
  if (cfg.out.empty()) {
    out << csv.str();
    if (cfg.svg) err << "warning: --svg needs --out\n";
    return exit_ok;
  }
  const fs::path dir = output_dir(cfg);
  write_text(dir / "bounds.csv", csv.str());
  std::vector<BoundCurve> curves;
  for (const BoundColumn& c : table.columns) {
    BoundCurve curve{bound_method_from_string(c.name), {}};
    for (std::size_t i = 0; i < rows; ++i) {
      if (c.values[i] && *c.values[i] > 0.0) curve.samples.push_back({grid[i], *c.values[i]});
    }
    std::sort(curve.samples.begin(), curve.samples.end(),
              [](const BoundSample& a, const BoundSample& b) { return a.t1 < b.t1; });
    curves.push_back(std::move(curve));
  }
  write_text(dir / "bounds.json", bound_curves_to_json(curves));
  if (cfg.svg) write_text(dir / "bounds.svg", bounds_plot_svg(table));
  out << "wrote " << (dir / "bounds.csv").string() << '\n';
  return exit_ok;
}

int cmd_certify(const RunConfig& cfg, const PresetRegistry& registry, std::ostream& out,
                std::ostream&) {
  validate(cfg);
  const double t1 = require_t1(cfg);
  const double r = require_radius(cfg);
  const Setup s = make_setup(cfg, registry);
  const Vector x0 = center_for(cfg, s, registry, r);
  const ConvexityCertificate cert =
      certify_ball(s.model, s.metric, x0, r, cfg.t0, t1, sampler_for(cfg));
  const std::string text = certificate_to_json(cert);
  if (!cfg.out.empty()) write_text(output_dir(cfg) / "certificate.json", text);
  out << text;
  return exit_for(cert.verdict);
}

int cmd_approx(const RunConfig& cfg, const PresetRegistry& registry, std::ostream& out,
               std::ostream& err) {
  validate(cfg);
  const double t1 = require_t1(cfg);
  const double r = require_radius(cfg);
  const Setup s = make_setup(cfg, registry);
  if (s.model.dim != 2) throw ConfigError("approx supports planar models only");
  const Vector x0 = center_for(cfg, s, registry, r);

  ConvexityCertificate cert;
  if (!cfg.certificate.empty()) {
    try {
      cert = certificate_from_json(read_file(cfg.certificate));
    } catch (const PreconditionError& e) {
      throw ConfigError(e.what());
    }
  } else {
    cert = certify_ball(s.model, s.metric, x0, r, cfg.t0, t1, sampler_for(cfg));
  }

  BoundaryImageOptions opts;
  opts.integrator.tol = cfg.tol;
  opts.allow_unsound = cfg.unsound;
  opts.jobs = cfg.jobs;
  BoundaryImage image;
  try {
    image = boundary_image_with_normals(s.model, s.metric, x0, r, cfg.t0, t1, cfg.n, &cert, opts);
  } catch (const RefusalError& e) {
    err << "error: " << e.what() << " (pass --unsound to override)\n";
    return exit_refused;
  }
  for (std::size_t k = 0; k < image.failures.size(); ++k) {
    err << "warning: skipped boundary angle " << format_double(image.skipped_angles[k]) << ": "
        << image.failures[k] << '\n';
  }

  const Polygon outer = outer_polygon(image.halfplanes);
  const Polygon inner = inner_polygon(image.halfplanes);
  std::optional<double> gap;
  try {
    gap = hausdorff_gap(outer, inner);
  } catch (const PreconditionError& e) {
    err << "warning: " << e.what() << '\n';
  }

  json summary;
  summary["model"] = s.model.name;
  summary["radius"] = r;
  summary["t0"] = cfg.t0;
  summary["t1"] = t1;
  summary["n"] = cfg.n;
  summary["unsound"] = image.unsound;
  summary["certificate_verdict"] = to_string(cert.verdict);
  summary["skipped_samples"] = image.skipped_angles.size();
  summary["outer_vertices"] = outer.vertices.size();
  summary["inner_vertices"] = inner.vertices.size();
  summary["outer_area"] = outer.area();
  summary["inner_area"] = inner.area();
  summary["diameter"] = outer.diameter();
  summary["hausdorff_gap"] = gap ? json(*gap) : json(nullptr);
  const std::string text = summary.dump(2) + "\n";

  if (!cfg.out.empty()) {
    const fs::path dir = output_dir(cfg);
    std::ostringstream o, i, h;
    write_polygon_csv(o, outer);
    write_polygon_csv(i, inner);
    write_halfplanes_csv(h, image.halfplanes);
    write_text(dir / "outer.csv", o.str());
    write_text(dir / "inner.csv", i.str());
    write_text(dir / "samples.csv", h.str());
    write_text(dir / "summary.json", text);
    if (cfg.svg) {
      std::vector<Point2> pts;
      for (const SupportingHalfplane& hp : image.halfplanes) pts.push_back(hp.point);
      write_text(dir / "approx.svg", approximation_svg(outer, inner, pts));
    }
  } else if (cfg.svg) {
    err << "warning: --svg needs --out\n";
  }
  out << text;
  return exit_ok;
}

int cmd_sweep(const RunConfig& cfg, const PresetRegistry& registry, std::ostream& out,
              std::ostream&) {
  validate(cfg);
  const std::vector<double> grid = time_grid(cfg);
  std::vector<double> radii;
  if (!trim(cfg.r_grid).empty()) {
    radii = parse_grid(cfg.r_grid);
  } else if (cfg.radius) {
    radii.push_back(*cfg.radius);
  }
  if (radii.empty()) throw ConfigError("empty radius grid (use --radius or --r-grid)");
  for (double r : radii) {
    if (!(r >= 0.0)) throw ConfigError("radii must be >= 0");
  }
  const Setup s = make_setup(cfg, registry);
  SamplerConfig sc = sampler_for(cfg);
  sc.jobs = 1;

  const std::size_t cells = grid.size() * radii.size();
  std::vector<ConvexityCertificate> certs(cells);
  std::vector<std::string> failures(cells);
  std::vector<Vector> centers(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    centers[c] = center_for(cfg, s, registry, radii[c % radii.size()]);
  }
  parallel_for(cells, cfg.jobs, [&](std::size_t c) {
    const double t = grid[c / radii.size()];
    const double r = radii[c % radii.size()];
    try {
      certs[c] = certify_ball(s.model, s.metric, centers[c], r, cfg.t0, t, sc);
    } catch (const Error& e) {
      failures[c] = e.what();
    }
  });

  std::ostringstream csv;
  csv << "t1,r,verdict,sup_lhs,samples_failed\n";
  for (std::size_t c = 0; c < cells; ++c) {
    csv << format_double(grid[c / radii.size()]) << ',' << format_double(radii[c % radii.size()])
        << ',';
    if (failures[c].empty()) {
      csv << to_string(certs[c].verdict) << ',' << format_double(certs[c].sup_lhs) << ','
          << certs[c].samples_failed << '\n';
    } else {
      csv << "error,,\n";
    }
  }
  if (cfg.out.empty()) {
    out << csv.str();
  } else {
    const fs::path dir = output_dir(cfg);
    write_text(dir / "sweep.csv", csv.str());
    out << "wrote " << (dir / "sweep.csv").string() << '\n';
  }
  return exit_ok;
}

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--preset", cfg.preset, "Model preset")->capture_default_str();
  cmd->add_option("--model-file", cfg.model_file, "Model spec file (key = value lines)");
  cmd->add_option("--omega", cfg.omega, "Pendulum omega");
  cmd->add_option("--gamma", cfg.gamma, "Pendulum gamma");
  cmd->add_option("--param", cfg.params, "Preset parameter override key=value");
  cmd->add_option("--metric-file", cfg.metric_file, "SPD weight matrix Q");
  cmd->add_option("--t0", cfg.t0, "Initial time")->capture_default_str();
  cmd->add_option("--t1", cfg.t1, "Final time");
  cmd->add_option("--tol", cfg.tol, "Integrator tolerance")->capture_default_str();
  cmd->add_option("--angles", cfg.angles, "Boundary angles for certification")
      ->capture_default_str();
  cmd->add_option("--center", cfg.center, "Ball centre")->delimiter(',');
  cmd->add_option("--out", cfg.out, "Output directory");
  cmd->add_option("--jobs", cfg.jobs, "Worker threads")->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Convexity certificates and polyhedral approximations of reachable sets",
               "convexreach"};
  app.require_subcommand(1, 1);

  auto* bounds = app.add_subcommand("bounds", "Radius bounds over a time grid");
  add_common(bounds, cfg);
  bounds->add_option("--t-grid", cfg.t_grid, "Times: a,b,c or start:stop:count");
  bounds->add_flag("--numerical", cfg.numerical, "Add the numerical radius column");
  bounds->add_option("--tol-r", cfg.tol_r, "Bisection width for --numerical")
      ->capture_default_str();
  bounds->add_flag("--svg", cfg.svg, "Also write a log-scale SVG plot");

  auto* certify = app.add_subcommand("certify", "Certify convexity of one ball image");
  add_common(certify, cfg);
  certify->add_option("--radius", cfg.radius, "Ball radius");

  auto* approx = app.add_subcommand("approx", "Inner and outer polygons of a convex image");
  add_common(approx, cfg);
  approx->add_option("--radius", cfg.radius, "Ball radius");
  approx->add_option("--n", cfg.n, "Boundary samples")->capture_default_str();
  approx->add_option("--certificate", cfg.certificate, "Certificate JSON from certify");
  approx->add_flag("--unsound", cfg.unsound, "Proceed without a convex certificate");
  approx->add_flag("--svg", cfg.svg, "Also write an SVG overlay");

  auto* sweep = app.add_subcommand("sweep", "Certify a grid of (t1, r) cells");
  add_common(sweep, cfg);
  sweep->add_option("--t-grid", cfg.t_grid, "Times: a,b,c or start:stop:count");
  sweep->add_option("--radius", cfg.radius, "Single radius");
  sweep->add_option("--r-grid", cfg.r_grid, "Radii: a,b,c or start:stop:count");
  bounds->add_option("--bracket", cfg.bracket, "Numerical radius bracket lo,hi")
      ->delimiter(',')
      ->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    if (app.get_subcommands().size() == 1) {
      err << "error: " << e.what() << '\n';
    } else {
      err << "error: " << e.what() << '\n' << app.help();
    }
    return exit_config;
  }

  const PresetRegistry registry = PresetRegistry::builtin();
  try {
    if (bounds->parsed()) return cmd_bounds(cfg, registry, out, err);
    if (certify->parsed()) return cmd_certify(cfg, registry, out, err);
    if (approx->parsed()) return cmd_approx(cfg, registry, out, err);
    return cmd_sweep(cfg, registry, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
}

}  // namespace convexreach::cli
