#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "lambda_lab/io.hpp"

namespace fs = std::filesystem;
using lambda_lab::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args, const fs::path& cwd = {}) {
  const fs::path prev = fs::current_path();
  if (!cwd.empty()) fs::current_path(cwd);
  std::ostringstream out, err;
  const int code = run(args, out, err);
  fs::current_path(prev);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "lambda_lab_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
  return out;
}

double fitted_slope(const fs::path& csv, const std::string& series) {
  fs::path fit = csv;
  fit.replace_extension(".fit.json");
  std::ifstream in(fit);
  return nlohmann::json::parse(in).at("fits").at(series).at("slope").get<double>();
}

}  // namespace

TEST_CASE("cli build: capwise paraboloid R = 64") {
  const auto path = scratch("set.json").string();
  const Result r = call({"build", "--manifold", "paraboloid", "--d", "3", "--R", "64", "--method", "capwise",
                         "--seed", "7", "--out", path});
  REQUIRE(r.code == 0);
  const auto f = lambda_lab::load_set(path);
  CHECK(f.size() >= 256);
  CHECK(f.size() <= 768);
  const auto& params = f.provenance().params;
  CHECK(params.at("total_target").get<double>() == doctest::Approx(512.0));
  CHECK(params.at("run_config").at("command") == "build");
  CHECK(params.at("config_hash").get<std::string>().size() == 16);
  CHECK(f.provenance().seed == 7);
}

TEST_CASE("cli estimate: one row per probe with a config header") {
  const std::string set = scratch("est.json").string();
  const fs::path csv = scratch("kp.csv");
  REQUIRE(call({"build", "--manifold", "paraboloid", "--d", "3", "--R", "16", "--method", "capwise", "--seed", "7",
                "--out", set}).code == 0);
  const Result r = call({"estimate", "--set", set, "--p", "4", "--probes", "constant,random,ascent", "--seed", "1",
                         "--out", csv.string()});
  REQUIRE(r.code == 0);
  const auto ls = lines(csv);
  REQUIRE(ls.size() >= 6);
  CHECK(ls[0].rfind("# config: ", 0) == 0);
  CHECK(ls[1].rfind("# config_hash: ", 0) == 0);
  CHECK(ls.size() - 3 >= 3);
  const auto header = split(ls[2]);
  CHECK(header[0] == "set_id");
  const auto ascent = split(ls[5]);
  CHECK(ascent[8] == "ascent");
  CHECK(std::stod(ascent[3]) >= std::stod(split(ls[3])[3]) - 1e-12);
}

TEST_CASE("cli sweep: Dirichlet kernel grows like N^{1/4} at p = 4") {
  const auto csv = scratch("dirichlet.csv");
  const Result r = call({"sweep", "--manifold", "lattice", "--d", "1", "--R", "64,128,256,512", "--method",
                         "fullgrid", "--p", "4", "--probe", "constant", "--out", csv.string()});
  REQUIRE(r.code == 0);
  CHECK(std::abs(fitted_slope(csv, "constant") - 0.25) <= 0.05);
  fs::path plot = csv;
  plot.replace_extension(".plot.py");
  CHECK(fs::exists(plot));
  CHECK(lines(csv).size() == 3 + 4);
}

// The full parabola grid has fourth moment ~ N² log N, so its constant probe
// grows only logarithmically; the N^{1/4} law belongs to the flat lattice.
TEST_CASE("cli sweep: parabola full grid at p = 4 fits slope 0.25" * doctest::should_fail()) {
  const auto csv = scratch("parabola.csv");
  const Result r = call({"sweep", "--manifold", "momentcurve", "--d", "2", "--R", "64,128,256,512", "--method",
                         "fullgrid", "--p", "4", "--probe", "constant", "--out", csv.string()});
  REQUIRE(r.code == 0);
  CHECK(std::abs(fitted_slope(csv, "constant") - 0.25) <= 0.05);
}

TEST_CASE("cli sweep: numeric output does not depend on the worker count") {
  // Same file name in two directories so the config header matches too.
  fs::create_directories(scratch("w1")), fs::create_directories(scratch("w3"));
  const auto a = scratch("w1") / "sweep.csv", b = scratch("w3") / "sweep.csv";
  for (const auto& [path, threads] : {std::pair{a, "1"}, std::pair{b, "3"}})
    REQUIRE(call({"--threads", threads, "sweep", "--manifold", "momentcurve", "--d", "2", "--R", "32,48,64",
                  "--method", "fullgrid", "--p", "5", "--probes", "constant,random,cap", "--trials", "8",
                  "--out", "sweep.csv"}, path.parent_path()).code == 0);
  const auto la = lines(a), lb = lines(b);
  REQUIRE(la.size() == lb.size());
  const auto header = split(la[2]);
  const std::size_t wall = static_cast<std::size_t>(std::find(header.begin(), header.end(), "wall_ms") - header.begin());
  for (std::size_t i = 0; i < la.size(); ++i) {
    auto ra = split(la[i]), rb = split(lb[i]);
    if (i >= 3) {
      ra.erase(ra.begin() + static_cast<long>(wall));
      rb.erase(rb.begin() + static_cast<long>(wall));
    }
    CHECK(ra == rb);
  }
}

TEST_CASE("cli oracle, experiment and diagnose") {
  const auto oracle = scratch("oracle.csv");
  const Result o = call({"oracle", "--trials", "5", "--samples", "200000", "--out", oracle.string()});
  CHECK(o.code == 0);
  CHECK(lines(oracle).size() == 3 + 5);

  const auto conc = scratch("conc.csv");
  CHECK(call({"experiment", "--kind", "concentration", "--M", "1000", "--delta", "0.1", "--trials", "500", "--out",
              conc.string()}).code == 0);
  fs::path cdf = conc;
  cdf.replace_extension(".cdf.csv");
  CHECK(fs::exists(cdf));

  const std::string set = scratch("diag.json").string();
  const fs::path diag = scratch("diag.csv");
  REQUIRE(call({"build", "--manifold", "paraboloid", "--d", "3", "--R", "64", "--method", "capwise", "--out", set}).code == 0);
  const Result d = call({"diagnose", "--set", set, "--kinds", "interference,necessity", "--out", diag.string()});
  CHECK(d.code == 0);
  const auto ls = lines(diag);
  CHECK(split(ls[2]) == std::vector<std::string>{"kind", "R", "param", "value", "error", "seed"});
  CHECK(ls.size() == 3 + 3);
}

TEST_CASE("cli exit codes") {
  CHECK(call({"--help"}).code == 0);
  CHECK(call({}).code == 1);
  CHECK(call({"frobnicate"}).code == 1);
  CHECK(call({"build", "--R", "64", "--out", scratch("x.json").string(), "--bogus"}).code == 1);
  CHECK(call({"build", "--R", "50", "--out", scratch("x.json").string()}).code == 1);
  CHECK(call({"build", "--R", "64", "--method", "smallcap", "--manifold", "momentcurve", "--d", "2", "--out",
              scratch("x.json").string()}).code == 1);

  // A threshold no draw can meet is a validation failure.
  const Result fam = call({"experiment", "--kind", "family", "--R", "16", "--C", "0.01", "--retries", "2", "--out",
                           scratch("fam.csv").string()});
  CHECK(fam.code == 2);
  CHECK(fam.err.find("validation failed") != std::string::npos);

  const auto bad = scratch("v2.json");
  REQUIRE(call({"build", "--R", "16", "--method", "squares", "--out", bad.string()}).code == 0);
  std::ifstream in(bad);
  auto j = nlohmann::json::parse(in);
  in.close();
  j["schema"] = "fset/2";
  std::ofstream(bad) << j.dump();
  const Result r = call({"estimate", "--set", bad.string(), "--p", "4", "--out", scratch("v2.csv").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("schema") != std::string::npos);
}
