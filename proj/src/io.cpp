#include "tikband/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace tikband {

namespace fs = std::filesystem;

namespace {

bool was_given(const RunSpec& spec, std::string_view flag) {
  return std::find(spec.given.begin(), spec.given.end(), flag) != spec.given.end();
}

void usage_check(bool ok, const std::string& message) { require(ok, ErrorKind::usage, message); }

const std::map<std::string, BandMethod> kMethods{{"gauss", BandMethod::gauss},
                                                 {"concentration", BandMethod::concentration}};

// ---- CSV --------------------------------------------------------------------

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::io_error, "cannot open " + path.string());
  Table t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    require(cells.size() == t.header.size(), ErrorKind::parse_error,
            path.string() + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                " fields, expected " + std::to_string(t.header.size()));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& s = cells[c];
      const char* end = s.data() + s.size();
      auto [ptr, ec] = std::from_chars(s.data(), end, row[c]);
      require(ec == std::errc() && ptr == end && std::isfinite(row[c]), ErrorKind::parse_error,
              path.string() + ": line " + std::to_string(line_no) + ": cannot parse '" + s + "' in column '" +
                  t.header[c] + "'");
    }
    t.rows.push_back(std::move(row));
  }
  require(!t.header.empty(), ErrorKind::parse_error, path.string() + ": missing header row");
  return t;
}

std::size_t column_index(const Table& t, const std::string& name, const fs::path& path) {
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  require(it != t.header.end(), ErrorKind::missing_column, path.string() + ": missing column \"" + name + "\"");
  return static_cast<std::size_t>(it - t.header.begin());
}

Eigen::VectorXd column(const Table& t, std::size_t c) {
  Eigen::VectorXd v(static_cast<Index>(t.rows.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) v[static_cast<Index>(i)] = t.rows[i][c];
  return v;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::io_error, "cannot write " + path.string());
  return out;
}

void write_grid_band(const ConfidenceBand& band, const fs::path& path, const char* header) {
  std::ofstream out = open_out(path);
  out << header << '\n';
  const Grid& g = band.estimate.grid();
  for (Index k = 0; k < g.size(); ++k)
    out << fmt17(g[k]) << ',' << fmt17(band.estimate[k]) << ',' << fmt17(band.lower[k]) << ','
        << fmt17(band.upper[k]) << '\n';
  require(out.good(), ErrorKind::io_error, "failed writing " + path.string());
}

// ---- CLI --------------------------------------------------------------------

struct Flags {
  std::string input, out, method, preset, noise, noise_table;
  std::vector<double> bounds, t_bounds, s_bounds, x_bounds;
  long long n = 0;
  double h = 0.0;
  int reps = 0;
};

}  // namespace

RunSpec parse_cli(const std::vector<std::string>& args) {
  static const std::map<std::string, Command> kCommands{{"npiv", Command::npiv},     {"funreg", Command::funreg},
                                                        {"deconv", Command::deconv}, {"mc", Command::mc},
                                                        {"dkw", Command::dkw}};
  RunSpec spec;
  Flags f;
  CLI::App app{"Tikhonov-regularized estimators with uniform confidence bands", "tikband"};
  app.set_help_flag("--help", "Print usage");
  app.require_subcommand(0, 1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", f.out, "Output path");
    sub->add_option("--gamma", spec.gamma, "Band level is 1 - gamma");
    sub->add_option("--grid", spec.grid_m, "Number of grid points");
    sub->add_option("--seed", spec.seed, "Random seed");
  };
  auto add_band = [&](CLI::App* sub) {
    sub->add_option("--alpha", spec.alpha, "Tikhonov regularization parameter");
    sub->add_option("--method", f.method, "gauss | concentration");
    sub->add_option("--process", spec.process_index, "Variance process (1 or 2)");
    sub->add_option("--c0", spec.c0, "Additive constant in the band half-width");
    sub->add_option("--draws", spec.gauss_draws, "Gaussian path draws");
    sub->add_option("--workers", spec.workers, "Worker threads");
  };

  auto* npiv = app.add_subcommand("npiv", "Nonparametric IV regression band");
  add_common(npiv);
  add_band(npiv);
  npiv->add_option("--input", f.input, "CSV with columns y,z,w");
  npiv->add_option("--h", f.h, "Kernel bandwidth");
  npiv->add_option("--truncation", spec.truncation, "Keep |z|,|w| <= truncation; grid is [-t, t]");

  auto* funreg = app.add_subcommand("funreg", "Functional linear / IV regression band");
  add_common(funreg);
  add_band(funreg);
  funreg->add_option("--input", f.input, "Wide CSV: y, z_1..z_mt, w_1..w_ms");
  funreg->add_option("--t-bounds", f.t_bounds, "Interval of the regressor curves")->expected(2);
  funreg->add_option("--s-bounds", f.s_bounds, "Interval of the instrument curves")->expected(2);

  auto* deconv = app.add_subcommand("deconv", "Density deconvolution band");
  add_common(deconv);
  add_band(deconv);
  deconv->add_option("--input", f.input, "CSV with column y");
  deconv->add_option("--noise", f.noise, "Known noise density, e.g. epanechnikov:0.2");
  deconv->add_option("--noise-table", f.noise_table, "CSV with columns u,f");
  deconv->add_option("--bounds", f.bounds, "Estimation interval")->expected(2);

  auto* mc = app.add_subcommand("mc", "Monte Carlo coverage study");
  add_common(mc);
  add_band(mc);
  mc->add_option("--preset", f.preset, "fig1a | fig1b | fig2a | fig2b");
  mc->add_option("--reps", f.reps, "Replications");
  mc->add_option("--n", f.n, "Sample size");
  mc->add_option("--h", f.h, "Kernel bandwidth");
  mc->add_option("--truncation", spec.truncation, "Truncation bound and grid half-range");
  mc->add_option("--phi-scale", spec.phi_scale, "Scale of the structural function");

  auto* dkw = app.add_subcommand("dkw", "DKW band for an empirical CDF");
  add_common(dkw);
  dkw->add_option("--input", f.input, "CSV with column x");
  dkw->add_option("--bounds", f.x_bounds, "Evaluation interval")->expected(2);

  if (!args.empty() && !args.front().starts_with("-")) {
    require(kCommands.contains(args.front()), ErrorKind::unknown_command,
            "unknown command '" + args.front() + "' (expected npiv, funreg, deconv, mc, dkw)");
  }

  std::vector<const char*> argv{"tikband"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    spec.help = app.help();
    return spec;
  } catch (const CLI::ParseError& e) {
    fail(ErrorKind::usage, e.what());
  }

  const auto subs = app.get_subcommands();
  usage_check(!subs.empty(), "missing command (expected npiv, funreg, deconv, mc, dkw)");
  CLI::App* sub = subs.front();
  spec.command = kCommands.at(sub->get_name());
  for (const CLI::Option* opt : sub->get_options())
    if (opt->count() > 0 && !opt->get_lnames().empty()) spec.given.push_back(opt->get_lnames().front());

  if (!f.input.empty()) spec.input_path = f.input;
  spec.output_path = f.out;
  if (!f.method.empty()) {
    const auto it = kMethods.find(f.method);
    usage_check(it != kMethods.end(), "--method must be gauss or concentration, got '" + f.method + "'");
    spec.method = it->second;
  }
  if (!f.preset.empty()) spec.preset = f.preset;
  if (!f.noise.empty()) spec.noise = f.noise;
  if (!f.noise_table.empty()) spec.noise_table = f.noise_table;
  if (was_given(spec, "h")) spec.h = f.h;
  if (was_given(spec, "reps")) spec.reps = f.reps;
  if (was_given(spec, "n")) {
    usage_check(f.n >= 2, "n must be at least 2");
    spec.n = static_cast<Index>(f.n);
  }
  if (!f.t_bounds.empty()) spec.t_lower = f.t_bounds[0], spec.t_upper = f.t_bounds[1];
  if (!f.s_bounds.empty()) spec.s_lower = f.s_bounds[0], spec.s_upper = f.s_bounds[1];
  if (!f.bounds.empty()) spec.bounds = std::pair{f.bounds[0], f.bounds[1]};
  if (!f.x_bounds.empty()) spec.x_bounds = std::pair{f.x_bounds[0], f.x_bounds[1]};

  // Validation shared by all commands.
  usage_check(spec.gamma > 0.0 && spec.gamma < 1.0, "gamma must lie in (0, 1)");
  usage_check(spec.grid_m >= 2, "grid must have at least 2 points");
  usage_check(spec.c0 >= 0.0, "c0 must be nonnegative");
  usage_check(spec.gauss_draws >= 100, "draws must be at least 100");
  usage_check(spec.workers >= 1, "workers must be at least 1");
  usage_check(spec.truncation > 0.0, "truncation must be positive");
  if (was_given(spec, "alpha")) usage_check(spec.alpha > 0.0, "alpha must be positive");
  if (spec.h) usage_check(*spec.h > 0.0, "h must be positive");
  if (spec.reps) usage_check(*spec.reps >= 1, "reps must be positive");
  usage_check(spec.process_index == 1 || spec.process_index == 2, "process must be 1 or 2");
  for (const auto* b : {&spec.bounds, &spec.x_bounds})
    if (*b) usage_check((*b)->first < (*b)->second, "bounds must satisfy lower < upper");
  usage_check(spec.t_lower < spec.t_upper && spec.s_lower < spec.s_upper, "curve bounds must satisfy lower < upper");

  const Command cmd = spec.command;
  if (cmd != Command::mc) {
    usage_check(spec.input_path.has_value(), "--input is required for " + sub->get_name());
    usage_check(!spec.output_path.empty(), "--out is required for " + sub->get_name());
  }
  if (cmd == Command::npiv || cmd == Command::funreg || cmd == Command::deconv)
    usage_check(was_given(spec, "alpha"), "--alpha is required for " + sub->get_name());
  if (cmd == Command::npiv) usage_check(spec.h.has_value(), "--h is required for npiv");
  if (cmd == Command::funreg) usage_check(spec.process_index == 1, "funreg supports process 1 only");
  if (cmd == Command::deconv) {
    if (!was_given(spec, "process")) spec.process_index = 2;
    usage_check(spec.process_index == 2, "deconv supports process 2 only");
    usage_check(spec.noise.has_value() != spec.noise_table.has_value(),
                "deconv needs exactly one of --noise or --noise-table");
  }
  if (cmd == Command::mc && spec.preset) preset(*spec.preset);  // validates the name
  return spec;
}

McConfig mc_config(const RunSpec& spec) {
  McConfig c = spec.preset ? preset(*spec.preset) : McConfig{};
  if (spec.n) c.n = *spec.n;
  if (spec.reps) c.replications = *spec.reps;
  if (was_given(spec, "alpha")) c.alpha = spec.alpha;
  if (spec.h) c.h = *spec.h;
  if (was_given(spec, "gamma")) c.gamma = spec.gamma;
  if (was_given(spec, "method")) c.method = spec.method;
  if (was_given(spec, "process")) c.process_index = spec.process_index;
  if (was_given(spec, "grid")) c.grid_m = spec.grid_m;
  if (was_given(spec, "truncation")) c.truncation = spec.truncation;
  if (was_given(spec, "c0")) c.c0 = spec.c0;
  if (was_given(spec, "draws")) c.gauss_draws = spec.gauss_draws;
  c.master_seed = spec.seed;
  c.variant.phi_scale = spec.phi_scale;
  validate(c);
  return c;
}

NpivData load_npiv_csv(const fs::path& path) {
  const Table t = read_csv(path);
  const std::size_t cy = column_index(t, "y", path);
  const std::size_t cz = column_index(t, "z", path);
  const std::size_t cw = column_index(t, "w", path);
  require(t.rows.size() >= 2, ErrorKind::too_few_rows,
          path.string() + ": need at least 2 rows, got " + std::to_string(t.rows.size()));
  return NpivData{column(t, cy), column(t, cz), column(t, cw)};
}

FunRegData load_funreg_csv(const fs::path& path, double t_lower, double t_upper, double s_lower, double s_upper) {
  const Table t = read_csv(path);
  const std::size_t cy = column_index(t, "y", path);
  std::vector<std::size_t> zc, wc;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (t.header[c].starts_with("z_")) zc.push_back(c);
    if (t.header[c].starts_with("w_")) wc.push_back(c);
  }
  require(zc.size() >= 2, ErrorKind::missing_column, path.string() + ": need at least 2 columns z_1..z_mt");
  require(wc.size() >= 2, ErrorKind::missing_column, path.string() + ": need at least 2 columns w_1..w_ms");
  require(t.rows.size() >= 2, ErrorKind::too_few_rows, path.string() + ": need at least 2 rows");
  const auto n = static_cast<Index>(t.rows.size());
  FunRegData d{column(t, cy), Eigen::MatrixXd(n, static_cast<Index>(zc.size())),
               Eigen::MatrixXd(n, static_cast<Index>(wc.size())),
               Grid(t_lower, t_upper, static_cast<Index>(zc.size())),
               Grid(s_lower, s_upper, static_cast<Index>(wc.size()))};
  for (Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < zc.size(); ++k) d.z_curves(i, static_cast<Index>(k)) = row[zc[k]];
    for (std::size_t k = 0; k < wc.size(); ++k) d.w_curves(i, static_cast<Index>(k)) = row[wc[k]];
  }
  return d;
}

Eigen::VectorXd load_column_csv(const fs::path& path, const std::string& name) {
  const Table t = read_csv(path);
  const std::size_t c = column_index(t, name, path);
  require(!t.rows.empty(), ErrorKind::too_few_rows, path.string() + ": no data rows");
  return column(t, c);
}

NoiseDensity load_noise_table(const fs::path& path) {
  const Table t = read_csv(path);
  const std::size_t cu = column_index(t, "u", path);
  const std::size_t cf = column_index(t, "f", path);
  return tabulated_noise(column(t, cu), column(t, cf));
}

NoiseDensity parse_noise_spec(const std::string& text) {
  const auto colon = text.find(':');
  usage_check(colon != std::string::npos && text.substr(0, colon) == "epanechnikov",
              "--noise must look like epanechnikov:<scale>, got '" + text + "'");
  const std::string value = text.substr(colon + 1);
  double scale = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), scale);
  usage_check(ec == std::errc() && ptr == value.data() + value.size() && scale > 0.0,
              "noise scale must be a positive number, got '" + value + "'");
  return epanechnikov_noise(scale);
}

nlohmann::json band_meta_json(const ConfidenceBand& band) {
  return nlohmann::json{{"method", std::string(to_string(band.request.method))},
                        {"process", band.request.process_index},
                        {"gamma", band.request.gamma},
                        {"alpha", band.alpha},
                        {"h", band.h},
                        {"half_width", band.half_width},
                        {"norm_2inf", band.diagnostics.norm_2inf},
                        {"n", band.n},
                        {"seed", band.request.seed}};
}

void write_json(const nlohmann::json& j, const fs::path& path) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  require(out.good(), ErrorKind::io_error, "failed writing " + path.string());
}

void write_band_csv(const ConfidenceBand& band, const fs::path& path) {
  write_grid_band(band, path, "z,estimate,lower,upper");
  write_json(band_meta_json(band), fs::path(path.string() + ".meta.json"));
}

void write_ecdf_csv(const ConfidenceBand& band, const fs::path& path) {
  write_grid_band(band, path, "x,ecdf,lower,upper");
}

nlohmann::json to_json(const McConfig& c) {
  return nlohmann::json{{"n", c.n},
                        {"replications", c.replications},
                        {"alpha", c.alpha},
                        {"h", c.h},
                        {"gamma", c.gamma},
                        {"method", std::string(to_string(c.method))},
                        {"process_index", c.process_index},
                        {"grid_m", c.grid_m},
                        {"truncation", c.truncation},
                        {"master_seed", c.master_seed},
                        {"c0", c.c0},
                        {"gauss_draws", c.gauss_draws},
                        {"phi_scale", c.variant.phi_scale}};
}

nlohmann::json to_json(const McReport& r) {
  return nlohmann::json{{"coverage", r.coverage},
                        {"mean_half_width", r.mean_half_width},
                        {"mean_sup_bias", r.mean_sup_bias},
                        {"replications_used", r.replications_used},
                        {"replications_failed", r.replications_failed},
                        {"config", to_json(r.config)}};
}

std::string run(const RunSpec& spec) {
  std::ostringstream summary;
  BandRequest req;
  req.method = spec.method;
  req.process_index = spec.process_index;
  req.gamma = spec.gamma;
  req.c0 = spec.c0;
  req.gauss_draws = spec.gauss_draws;
  req.seed = spec.seed;
  req.workers = spec.workers;

  auto report_band = [&](const char* name, const ConfidenceBand& band) {
    write_band_csv(band, spec.output_path);
    summary << name << ": n=" << band.n << " half_width=" << fmt17(band.half_width) << " -> "
            << spec.output_path.string();
  };

  switch (spec.command) {
    case Command::npiv: {
      const NpivData raw = load_npiv_csv(*spec.input_path);
      const NpivData data = truncate_sample(raw, spec.truncation);
      require(data.size() >= 2, ErrorKind::too_few_rows, "fewer than 2 observations survive truncation");
      const Grid grid(-spec.truncation, spec.truncation, spec.grid_m);
      const Fit fit = npiv_fit(data, spec.alpha, *spec.h, grid, grid);
      const ResidualMatrix res = npiv_residuals(fit, data, spec.process_index, grid);
      report_band("npiv", build_band(fit, res, req));
      break;
    }
    case Command::funreg: {
      const FunRegData data =
          load_funreg_csv(*spec.input_path, spec.t_lower, spec.t_upper, spec.s_lower, spec.s_upper);
      const Fit fit = funreg_fit(data, spec.alpha);
      report_band("funreg", build_band(fit, funreg_residuals(fit, data), req));
      break;
    }
    case Command::deconv: {
      const Eigen::VectorXd y = load_column_csv(*spec.input_path, "y");
      NoiseDensity noise = spec.noise ? parse_noise_spec(*spec.noise) : load_noise_table(*spec.noise_table);
      const auto [lo, hi] = spec.bounds.value_or(std::pair{y.minCoeff() - noise.upper, y.maxCoeff() - noise.lower});
      DeconvData data{y, std::move(noise), Grid(lo, hi, spec.grid_m)};
      const Fit fit = deconv_fit(data, spec.alpha);
      report_band("deconv", build_band(fit, deconv_residuals(fit, data), req));
      break;
    }
    case Command::dkw: {
      const Eigen::VectorXd x = load_column_csv(*spec.input_path, "x");
      double lo = x.minCoeff();
      double hi = x.maxCoeff();
      if (spec.x_bounds) std::tie(lo, hi) = *spec.x_bounds;
      require(lo < hi, ErrorKind::invalid_bounds, "sample range is degenerate; pass --bounds");
      const ConfidenceBand band = dkw_band(as_span(x), spec.gamma, Grid(lo, hi, spec.grid_m));
      write_ecdf_csv(band, spec.output_path);
      summary << "dkw: n=" << band.n << " half_width=" << fmt17(band.half_width) << " -> "
              << spec.output_path.string();
      break;
    }
    case Command::mc: {
      const McReport report = run_coverage(mc_config(spec), spec.workers);
      const nlohmann::json j = to_json(report);
      if (spec.output_path.empty()) return j.dump(2);
      write_json(j, spec.output_path);
      summary << "mc: coverage=" << report.coverage << " mean_half_width=" << report.mean_half_width
              << " replications_used=" << report.replications_used << " -> " << spec.output_path.string();
      break;
    }
  }
  return summary.str();
}

}  // namespace tikband
