#include "ghostdiff/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace ghostdiff {
namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return ss.str();
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::scientific, 16);
  if (ec != std::errc()) throw IoError("number formatting failed");
  return std::string(buf.data(), ptr);
}

std::string profile_csv(const DensityProfile<double>& profile) {
  std::string out = "position_m,value\n";
  out.reserve(out.size() + static_cast<std::size_t>(profile.size()) * 48);
  for (Eigen::Index i = 0; i < profile.size(); ++i) {
    out += format_double(profile.positions()[i]);
    out += ',';
    out += format_double(profile.values()[i]);
    out += '\n';
  }
  return out;
}

namespace {

static_assert(sizeof(double) == 8);

void put_le(char* dst, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) dst[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
}

double get_le(const char* src) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= std::uint64_t(static_cast<unsigned char>(src[b])) << (8 * b);
  return std::bit_cast<double>(bits);
}

nlohmann::ordered_json axis_json(const char* name, const Axis<double>& a) {
  return {{"name", name}, {"n", a.n}, {"start", a.position(0)}, {"spacing", a.spacing}};
}

Axis<double> axis_from(const nlohmann::json& j) {
  return {j.at("n").get<Eigen::Index>(), j.at("spacing").get<double>()};
}

fs::path with_suffix(fs::path stem, const char* suffix) {
  stem += suffix;
  return stem;
}

}  // namespace

void dump_grid(const WaveGrid<double>& grid, const fs::path& stem) {
  const Eigen::Index rows = grid.z1.n, cols = grid.z2.n;
  std::string bytes(static_cast<std::size_t>(rows * cols) * 16, '\0');
  char* out = bytes.data();
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      put_le(out, grid.amplitudes(i, j).real());
      put_le(out + 8, grid.amplitudes(i, j).imag());
      out += 16;
    }
  nlohmann::ordered_json meta = {
      {"format", "complex float64 little-endian (re, im)"},
      {"layout", "row-major"},
      {"rows", axis_json("z1", grid.z1)},
      {"cols", axis_json("z2", grid.z2)},
      {"units", "m"},
  };
  write_file_atomic(with_suffix(stem, ".bin"), bytes);
  write_file_atomic(with_suffix(stem, ".json"), meta.dump(2) + "\n");
}

WaveGrid<double> load_grid(const fs::path& stem) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(with_suffix(stem, ".json")));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed grid sidecar: ") + e.what());
  }
  WaveGrid<double> g{axis_from(meta.at("rows")), axis_from(meta.at("cols")), {}};
  const std::string bytes = read_file(with_suffix(stem, ".bin"));
  if (bytes.size() != static_cast<std::size_t>(g.z1.n * g.z2.n) * 16) throw IoError("grid payload size mismatch");
  g.amplitudes.resize(g.z1.n, g.z2.n);
  const char* in = bytes.data();
  for (Eigen::Index i = 0; i < g.z1.n; ++i)
    for (Eigen::Index j = 0; j < g.z2.n; ++j) {
      g.amplitudes(i, j) = {get_le(in), get_le(in + 8)};
      in += 16;
    }
  return g;
}

}  // namespace ghostdiff
