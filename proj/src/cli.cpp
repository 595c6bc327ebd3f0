#include "ghostdiff/cli.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ghostdiff/config_io.hpp"
#include "ghostdiff/io.hpp"
#include "ghostdiff/oracle.hpp"
#include "ghostdiff/scenario.hpp"
#include "ghostdiff/units.hpp"

namespace ghostdiff::cli {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    const auto end = text.find(sep, begin);
    parts.push_back(text.substr(begin, end - begin));
    if (end == std::string::npos) return parts;
    begin = end + 1;
  }
}

// "start,stop,count" with unit-suffixed endpoints.
Scan parse_scan(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw ValidationError("scan", "expected start,stop,count");
  std::size_t used = 0;
  int count = 0;
  try {
    count = std::stoi(parts[2], &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != parts[2].size()) throw ValidationError("scan", "count must be an integer");
  return {parse_length(parts[0]), parse_length(parts[1]), count};
}

std::vector<double> parse_lengths(const std::string& text) {
  std::vector<double> values;
  for (const auto& p : split(text, ',')) values.push_back(parse_length(p));
  return values;
}

struct Options {
  std::string scenario;
  std::string config_path;
  std::string out_dir = ".";
  std::string scan;
  std::string z0;
  std::optional<double> peak_scale;
  std::map<std::string, std::string> fields;
  std::string sweep_eps;
  std::string sweep_d;
  std::optional<int> threads;
  std::optional<int> grid_points;
  bool refine = false;
  std::string dump_grid;
  std::optional<double> quad_tolerance;
  std::optional<int> quad_max_order;
  bool quiet = false;
};

void add_common(CLI::App& cmd, Options& o) {
  cmd.add_option("--config", o.config_path, "JSON config file; unit-suffixed strings");
  cmd.add_option("--out", o.out_dir, "output directory for CSV files");
  cmd.add_option("--scan", o.scan, "detector scan start,stop,count (e.g. -10mm,10mm,401)");
  cmd.add_option("--threads", o.threads, "worker threads (default: GHOSTDIFF_THREADS or all cores)");
  cmd.add_flag("--quiet", o.quiet, "suppress the table on stderr");
  cmd.add_option("--quad-tolerance", o.quad_tolerance, "slit quadrature relative tolerance (default 1e-10)");
  cmd.add_option("--quad-max-order", o.quad_max_order, "slit quadrature maximum Gauss-Legendre order (default 1024)");
  for (const char* key : {"wavelength", "slit_width", "sigma", "omega", "L1", "L2"})
    cmd.add_option_function<std::string>(std::string("--") + key,
                                         [&o, key](const std::string& v) { o.fields[key] = v; },
                                         std::string("override ") + key);
}

Scenario build(const Options& o) {
  Scenario s;
  s.name = o.scenario;
  if (!o.config_path.empty()) s.config = load_config(o.config_path);
  for (const auto& [key, value] : o.fields) set_config_field(s.config, key, value);
  if (!o.scan.empty()) s.scan = parse_scan(o.scan);
  if (!o.z0.empty()) s.z0 = parse_length(o.z0);
  if (o.peak_scale) s.peak_scale = *o.peak_scale;
  if (!o.sweep_eps.empty()) s.sweep_slit_widths = parse_lengths(o.sweep_eps);
  if (!o.sweep_d.empty()) s.sweep_distances = parse_lengths(o.sweep_d);
  if (o.threads) s.threads = *o.threads;
  if (o.grid_points) {
    if (*o.grid_points < 64) throw ValidationError("grid_points", "must be at least 64");
    s.grid_points = *o.grid_points;
  }
  if (o.quad_tolerance) s.quadrature.tolerance = *o.quad_tolerance;
  if (o.quad_max_order) s.quadrature.max_order = *o.quad_max_order;
  s.refine = o.refine;
  if (!o.dump_grid.empty()) s.dump_grid_stem = o.dump_grid;
  s.out_dir = o.out_dir;
  return s;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-photon single-slit ghost diffraction simulator", "ghostdiff"};
  app.require_subcommand(1);
  Options o;

  auto* run_cmd = app.add_subcommand("run", "run a named scenario");
  std::string names;
  for (auto n : kScenarioNames) names += (names.empty() ? "" : ", ") + std::string(n);
  run_cmd->add_option("scenario", o.scenario, "one of: " + names)->required();
  add_common(*run_cmd, o);
  run_cmd->add_option("--z0", o.z0, "D1 position for the shifted scenario (e.g. 0.5mm)");
  run_cmd->add_option("--peak-scale", o.peak_scale, "peak value of CSV profiles (default 500)");
  run_cmd->add_option("--sweep-eps", o.sweep_eps, "fringe-sweep slit widths (e.g. 0.2mm,0.4mm,0.8mm)");
  run_cmd->add_option("--sweep-D", o.sweep_d, "fringe-sweep total distances (e.g. 0.9m,1.8m,3.6m)");
  run_cmd->add_option("--grid-points", o.grid_points, "validate-grid points per axis (default 2048)");
  run_cmd->add_flag("--refine", o.refine, "validate-grid: also run at doubled resolution");
  run_cmd->add_option("--dump-grid", o.dump_grid, "validate-grid: write <stem>.bin and <stem>.json");

  auto* validate_cmd = app.add_subcommand("validate", "compare against a brute-force oracle");
  std::string oracle;
  validate_cmd->add_option("oracle", oracle, "quadrature or grid")
      ->required()
      ->check(CLI::IsMember({"quadrature", "grid"}));
  add_common(*validate_cmd, o);
  validate_cmd->add_option("--grid-points", o.grid_points, "grid points per axis (default 2048)");
  validate_cmd->add_flag("--refine", o.refine, "grid: also run at doubled resolution");
  validate_cmd->add_option("--dump-grid", o.dump_grid, "grid: write <stem>.bin and <stem>.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help requests exit 0; anything else is invalid input.
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }
  if (validate_cmd->parsed()) o.scenario = "validate-" + oracle;

  ScopedWarningHandler warnings([&err](std::string_view m) { err << "warning: " << m << '\n'; });
  try {
    const auto summary = run(build(o));
    out << summary.data.dump(2) << '\n';
    if (!o.quiet) err << summary.table();
    return 0;
  } catch (const ValidationError& e) {
    err << "error: invalid input: " << e.what() << '\n';
    return 2;
  } catch (const ConvergenceError& e) {
    err << "error: not converged: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    err << "error: i/o: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace ghostdiff::cli
