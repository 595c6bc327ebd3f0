#pragma once

#include <string_view>

namespace ghostdiff {

/// Parses a length such as "702.2nm", "0.4 mm", "1.8m" or a bare number
/// (taken as meters). Accepted suffixes: nm, um, µm, mm, cm, m.
double parse_length(std::string_view text);

/// Parses an inverse length such as "5.0/mm", "5 mm^-1", "1/um" or a bare
/// number (taken as 1/m).
double parse_inverse_length(std::string_view text);

}  // namespace ghostdiff
