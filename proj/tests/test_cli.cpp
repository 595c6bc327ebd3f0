#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "ghostdiff/cli.hpp"
#include "ghostdiff/io.hpp"

namespace fs = std::filesystem;
using ghostdiff::read_file;
using doctest::Approx;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
  nlohmann::json summary() const { return nlohmann::json::parse(out); }
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ghostdiff");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = ghostdiff::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("ghostdiff_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

struct Csv {
  std::string header;
  std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  std::getline(in, csv.header);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    csv.rows.push_back(cells);
  }
  return csv;
}

}  // namespace

TEST_CASE("ghost scenario writes a peak-scaled profile") {
  TempDir dir("ghost");
  const auto r = invoke({"run", "ghost", "--out", dir.str(), "--quiet"});
  REQUIRE(r.code == 0);
  const auto s = r.summary();
  CHECK(s["scenario"] == "ghost");
  CHECK(s["config"]["wavelength_m"].get<double>() == Approx(702.2e-9));
  CHECK(s["derived"]["is_entangled"] == true);
  CHECK(s["results"]["fringe"]["status"] == "pattern-not-resolved");

  const auto csv = parse_csv(read_file(dir.path / "ghost.csv"));
  CHECK(csv.header == "position_m,value");
  REQUIRE(csv.rows.size() == 401);
  double peak = 0;
  for (const auto& row : csv.rows) peak = std::max(peak, std::stod(row[1]));
  CHECK(peak == 500.0);
  CHECK(csv.rows.front()[0] == "-1.0000000000000000e-02");
  CHECK(csv.rows.back()[0] == "1.0000000000000000e-02");

  // Same inputs, same bytes.
  const auto first = read_file(dir.path / "ghost.csv");
  REQUIRE(invoke({"run", "ghost", "--out", dir.str(), "--quiet"}).code == 0);
  CHECK(read_file(dir.path / "ghost.csv") == first);
}

TEST_CASE("ghost minima appear at large sigma") {
  TempDir dir("ghost_sharp");
  const auto r = invoke({"run", "ghost", "--out", dir.str(), "--sigma", "50/mm", "--omega", "20mm",
                         "--scan", "-10mm,10mm,401", "--peak-scale", "500", "--quiet"});
  REQUIRE(r.code == 0);
  const auto f = r.summary()["results"]["fringe"];
  REQUIRE(f["status"] == "resolved");
  CHECK(f["first_min_left_m"].get<double>() == Approx(-3.16e-3).epsilon(0.05));
  CHECK(f["first_min_right_m"].get<double>() == Approx(3.16e-3).epsilon(0.05));
}

TEST_CASE("config file and flag precedence") {
  TempDir dir("config");
  {
    std::ofstream cfg(dir.path / "cfg.json");
    cfg << R"({"wavelength": "800nm", "slit_width": "0.2mm"})";
  }
  const auto r = invoke({"run", "shifted", "--config", (dir.path / "cfg.json").string(), "--slit_width", "0.3mm",
                         "--z0", "1mm", "--out", dir.str(), "--quiet"});
  REQUIRE(r.code == 0);
  const auto s = r.summary();
  CHECK(s["config"]["wavelength_m"].get<double>() == Approx(800e-9));
  CHECK(s["config"]["slit_width_m"].get<double>() == Approx(0.3e-3));
  CHECK(s["results"]["z0_m"].get<double>() == Approx(1e-3));
  CHECK(s["results"]["argmax_shift_m"].get<double>() > 0);
}

TEST_CASE("disentangled scenario") {
  TempDir dir("disentangled");
  const auto r = invoke({"run", "disentangled", "--out", dir.str(), "--quiet"});
  REQUIRE(r.code == 0);
  const auto s = r.summary();
  CHECK(s["derived"]["is_entangled"] == false);
  CHECK(s["derived"]["abs_beta_per_m2"].get<double>() == 0.0);
  CHECK(s["config"]["omega_m"].get<double>() == Approx(1e-4));
  CHECK(s["results"]["z2_conditional"]["fringe"]["status"] == "pattern-not-resolved");
  const auto zeros = s["results"]["z1_marginal"]["zeros"];
  REQUIRE(zeros.size() == 7);
  for (const auto& z : zeros) CHECK(z["rel_err"].get<double>() < 0.02);
  CHECK(fs::exists(dir.path / "disentangled_z1.csv"));
  CHECK(fs::exists(dir.path / "disentangled_z2.csv"));
}

TEST_CASE("marginal and first-order scenarios") {
  TempDir dir("marginals");
  const auto z1 = invoke({"run", "marginal-z1", "--out", dir.str(), "--quiet"});
  REQUIRE(z1.code == 0);
  CHECK(z1.summary()["results"]["extrema"]["unimodal"] == true);

  const auto first = invoke({"run", "first-order", "--out", dir.str(), "--quiet"});
  REQUIRE(first.code == 0);
  const auto res = first.summary()["results"];
  CHECK(res["disentangled"]["minima"].get<int>() > res["entangled"]["minima"].get<int>());
}

TEST_CASE("fringe sweep CSV") {
  TempDir dir("sweep");
  const auto r = invoke({"run", "fringe-sweep", "--out", dir.str(), "--sigma", "50/mm", "--omega", "20mm", "--quiet",
                         "--threads", "2"});
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(read_file(dir.path / "fringe_sweep.csv"));
  CHECK(csv.header == "param,width_measured_m,width_formula_m,rel_err");
  REQUIRE(csv.rows.size() == 9);
  CHECK(csv.rows[0][0] == "eps=2.0000000000000001e-04;D=9.0000000000000013e-01");
  for (const auto& row : csv.rows) CHECK(std::stod(row[3]) < 0.05);

  // Unresolved points are written as nan, in input order.
  const auto ref = invoke({"run", "fringe-sweep", "--out", dir.str(), "--quiet", "--threads", "3"});
  REQUIRE(ref.code == 0);
  const auto rows = parse_csv(read_file(dir.path / "fringe_sweep.csv")).rows;
  CHECK(rows[0][1] == "nan");
  CHECK(rows[0][3] == "nan");
  CHECK(rows[8][0].rfind("eps=8.0", 0) == 0);
}

TEST_CASE("validate quadrature reports the convention adjudication") {
  TempDir dir("quad");
  const auto r = invoke({"validate", "quadrature", "--out", dir.str(), "--quiet"});
  REQUIRE(r.code == 0);
  const auto q = r.summary()["results"];
  CHECK(q["sinc_convention"]["supported"] == "rederived");
  CHECK(q["halving"]["ratio"].get<double>() == Approx(1.433).epsilon(1e-2));
  CHECK(parse_csv(read_file(dir.path / "validate_quadrature.csv")).rows.size() == 21);
}

TEST_CASE("validate grid at the default resolution") {
  TempDir dir("grid");
  const auto stem = (dir.path / "psi").string();
  const auto r = invoke({"validate", "grid", "--out", dir.str(), "--dump-grid", stem, "--quiet"});
  REQUIRE(r.code == 0);
  const auto g = r.summary()["results"];
  CHECK(g["grid"]["points"] == 2048);
  CHECK(g["l_inf_rel"].get<double>() <= 1e-2);
  CHECK(g["vs_quadrature"]["l_inf_rel"].get<double>() <= 5e-3);
  CHECK(fs::file_size(stem + ".bin") == 2048ull * 2048 * 16);
  CHECK(fs::exists(stem + ".json"));
}

TEST_CASE("exit codes") {
  TempDir dir("codes");
  CHECK(invoke({"run", "ghost", "--out", dir.str(), "--wavelength", "-5nm"}).code == 2);
  CHECK(invoke({"run", "ghost", "--out", dir.str(), "--omega", "lots"}).code == 2);
  CHECK(invoke({"run", "nonsense", "--out", dir.str()}).code == 2);
  CHECK(invoke({"run", "ghost", "--out", dir.str(), "--scan", "1mm,-1mm,10"}).code == 2);
  CHECK(invoke({"run", "ghost", "--out", dir.str(), "--config", (dir.path / "missing.json").string()}).code == 4);
  CHECK(invoke({"validate", "sideways"}).code == 2);
  CHECK(invoke({}).code == 2);

  {
    std::ofstream bad(dir.path / "bad.json");
    bad << R"({"colour": "red"})";
  }
  const auto unknown = invoke({"run", "ghost", "--out", dir.str(), "--config", (dir.path / "bad.json").string()});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("colour") != std::string::npos);

  // A regular file where the output directory should be.
  { std::ofstream blocker(dir.path / "file"); }
  CHECK(invoke({"run", "ghost", "--out", (dir.path / "file" / "sub").string()}).code == 4);

  const auto stalled = invoke({"validate", "quadrature", "--out", dir.str(), "--quad-tolerance", "1e-16",
                               "--quad-max-order", "64"});
  CHECK(stalled.code == 3);
  CHECK(stalled.err.find("not converged") != std::string::npos);

  const auto help = invoke({"run", "--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("--peak-scale") != std::string::npos);
}

TEST_CASE("installed tool") {
  const char* tool = std::getenv("GHOSTDIFF_TOOL");
  if (!tool) return;
  TempDir dir("tool");
  const std::string base = std::string("\"") + tool + "\" ";
  CHECK(std::system((base + "run ghost --quiet --out \"" + dir.str() + "\" > \"" + dir.str() + "/s.json\"").c_str()) == 0);
  CHECK(nlohmann::json::parse(read_file(dir.path / "s.json"))["scenario"] == "ghost");
  const int status = std::system((base + "run ghost --sigma -1/mm --out \"" + dir.str() + "\" 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
