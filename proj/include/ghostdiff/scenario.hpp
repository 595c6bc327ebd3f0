#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ghostdiff/core.hpp"
#include "ghostdiff/diagnostics.hpp"
#include "ghostdiff/oracle.hpp"

namespace ghostdiff::cli {

inline constexpr std::array<std::string_view, 9> kScenarioNames{
    "ghost",        "shifted",     "marginal-z1",  "marginal-z2",         "disentangled",
    "first-order",  "fringe-sweep", "validate-quadrature", "validate-grid"};

bool is_scenario(std::string_view name);

/// One named experiment plus its options. Unset scans fall back to
/// per-scenario defaults.
struct Scenario {
  std::string name;
  Config config = reference_config();
  std::optional<Scan> scan;
  double z0 = 0.5e-3;           // shifted: D1 position
  double peak_scale = 500.0;    // CSV profiles are peak-scaled to this value
  std::vector<double> sweep_slit_widths{0.2e-3, 0.4e-3, 0.8e-3};
  std::vector<double> sweep_distances{0.9, 1.8, 3.6};
  Eigen::Index grid_points = 2048;
  double grid_half_extent = 25e-3;
  bool refine = false;          // validate-grid: also run at doubled resolution
  double richardson_z2 = 2e-3;  // validate-quadrature: z2 of the eps-halving check
  QuadratureSpec quadrature;
  std::filesystem::path out_dir = ".";
  std::optional<std::filesystem::path> dump_grid_stem;
  int threads = thread_budget();
};

struct RunSummary {
  nlohmann::ordered_json data;
  std::vector<std::filesystem::path> files;

  /// Human-readable rendering of `data`, one `key  value` line per leaf.
  std::string table() const;
};

/// Runs a scenario, writes its CSV files into `out_dir` and returns the
/// summary. Throws ValidationError, ConvergenceError or IoError.
RunSummary run(const Scenario& scenario);

}  // namespace ghostdiff::cli
