#include "ghostdiff/config_io.hpp"

#include <string>

#include <json.hpp>

#include "ghostdiff/io.hpp"
#include "ghostdiff/units.hpp"

namespace ghostdiff {
namespace {

struct FieldSlot {
  double* value;
  bool inverse_length;
};

FieldSlot field(Config& c, std::string_view key) {
  if (key == "wavelength") return {&c.wavelength, false};
  if (key == "slit_width") return {&c.slit_width, false};
  if (key == "sigma") return {&c.sigma, true};
  if (key == "omega") return {&c.omega, false};
  if (key == "L1" || key == "l1") return {&c.l1, false};
  if (key == "L2" || key == "l2") return {&c.l2, false};
  throw ValidationError(std::string(key), "unknown config key");
}

}  // namespace

void set_config_field(Config& c, std::string_view key, std::string_view value) {
  const FieldSlot slot = field(c, key);
  try {
    *slot.value = slot.inverse_length ? parse_inverse_length(value) : parse_length(value);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(key), e.what());
  }
}

Config parse_config(std::string_view json_text, Config base) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config", "top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (value.is_string())
      set_config_field(base, key, value.get<std::string>());
    else if (value.is_number())
      *field(base, key).value = value.get<double>();
    else
      throw ValidationError(key, "expected a string with units or a number");
  }
  validate(base);
  return base;
}

Config load_config(const std::filesystem::path& path, Config base) {
  return parse_config(read_file(path), base);
}

}  // namespace ghostdiff
