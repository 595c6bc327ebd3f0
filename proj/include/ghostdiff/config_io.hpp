#pragma once

#include <filesystem>
#include <string_view>

#include "ghostdiff/core.hpp"

namespace ghostdiff {

/// Parses a JSON config document. Keys: wavelength, slit_width, omega, L1,
/// L2 (lengths) and sigma (inverse length); values are unit-suffixed strings
/// or bare SI numbers. Missing keys keep their value in `base`.
Config parse_config(std::string_view json_text, Config base = reference_config());

Config load_config(const std::filesystem::path& path, Config base = reference_config());

/// Sets one named field from a unit-suffixed string.
void set_config_field(Config& config, std::string_view key, std::string_view value);

}  // namespace ghostdiff
