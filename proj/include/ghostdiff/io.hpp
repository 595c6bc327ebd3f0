#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ghostdiff/oracle.hpp"
#include "ghostdiff/profile.hpp"

namespace ghostdiff {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// 17 significant digits in scientific notation, '.' as decimal separator,
/// independent of the global locale.
std::string format_double(double value);

/// CSV with header `position_m,value`.
std::string profile_csv(const DensityProfile<double>& profile);

/// Writes `<stem>.bin` (little-endian float64 re/im pairs, row-major with
/// rows along z1) and `<stem>.json` describing both axes.
void dump_grid(const WaveGrid<double>& grid, const std::filesystem::path& stem);

WaveGrid<double> load_grid(const std::filesystem::path& stem);

}  // namespace ghostdiff
