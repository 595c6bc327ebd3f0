#include "ghostdiff/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <utility>

#include "ghostdiff/core.hpp"

namespace ghostdiff {
namespace {

constexpr std::array<std::pair<std::string_view, double>, 7> kLengthUnits{{
    {"nm", 1e-9},
    {"um", 1e-6},
    {"\xC2\xB5m", 1e-6},
    {"mm", 1e-3},
    {"cm", 1e-2},
    {"m", 1.0},
    {"", 1.0},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Splits "<number><rest>" and returns the number; `rest` receives the suffix.
double leading_number(std::string_view text, std::string_view& rest) {
  text = trim(text);
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || !std::isfinite(value))
    throw ValidationError("quantity", "cannot parse number in '" + std::string(text) + "'");
  rest = trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
  return value;
}

double length_scale(std::string_view unit, std::string_view original) {
  for (const auto& [name, scale] : kLengthUnits)
    if (unit == name) return scale;
  throw ValidationError("quantity", "unknown length unit in '" + std::string(original) + "'");
}

}  // namespace

double parse_length(std::string_view text) {
  std::string_view unit;
  const double value = leading_number(text, unit);
  return value * length_scale(unit, text);
}

double parse_inverse_length(std::string_view text) {
  std::string_view unit;
  const double value = leading_number(text, unit);
  if (unit.empty()) return value;

  if (unit.front() == '/') {
    unit.remove_prefix(1);
    return value / length_scale(trim(unit), text);
  }
  for (std::string_view suffix : {"^-1", "-1"}) {
    if (unit.size() > suffix.size() && unit.ends_with(suffix)) {
      unit.remove_suffix(suffix.size());
      return value / length_scale(trim(unit), text);
    }
  }
  throw ValidationError("quantity", "expected an inverse length in '" + std::string(text) + "'");
}

}  // namespace ghostdiff
