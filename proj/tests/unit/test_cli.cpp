#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <stdexcept>
#include <vector>

#include "config.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("morreylab_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run(const std::string& args) {
  const std::string cmd = std::string(MORREYLAB_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(slurp(p));
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const char* kSmallSolve =
    "--p 4 --r-min 0.125 --r-max 64 --cells-per-octave 4 --n-phi 17 --eps-schedule 1e-2,1e-3";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("beta-table") {
  const fs::path d = scratch("beta");
  REQUIRE(run("beta-table --out-dir " + d.string()) == 0);
  const auto rows = csv(d / "beta_table.csv");
  REQUIRE(rows.size() == 8);
  CHECK(rows[0] == std::vector<std::string>{"p", "beta_p", "aperture"});
  double prev = 2.0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double p = std::stod(rows[k][0]);
    const double b = std::stod(rows[k][1]);
    CHECK(b < prev);
    prev = b;
    CHECK(std::abs(std::stod(rows[k][2]) - 1.0) < 1e-10);
    if (p == 3.0) CHECK(std::abs(b - 0.5773503) < 5e-8);
    if (p == 4.0) CHECK(std::abs(b - (-1.0 + 2.0 * std::sqrt(7.0)) / 9.0) < 1e-15);
    CHECK(rows[k][1].find('.') != std::string::npos);
  }
  const json manifest = json::parse(slurp(d / "manifest.json"));
  CHECK(manifest["command"] == "beta-table");
  for (const auto& f : manifest["outputs"]) CHECK(fs::exists(d / f.get<std::string>()));
}

TEST_CASE("usage errors exit with 1") {
  const fs::path d = scratch("usage");
  const std::string o = " --out-dir " + d.string();
  CHECK(run("beta-table --p-values 1.5,3" + o) == 1);
  CHECK(run("beta-table --no-such-flag" + o) == 1);
  CHECK(run("" + o) == 1);
  CHECK(run("aronsson --p 4" + o) == 1);
  CHECK(run("aronsson --p 4 --kappa 1 --L 1" + o) == 1);
  CHECK(run("aronsson --p 4 --L -0.5" + o) == 1);
  CHECK(run("aronsson --p 4 --kappa 0" + o) == 1);
  CHECK(run("solve --p 4 --n-phi 16" + o) == 1);
  CHECK(run("analyze" + o) == 1);
  CHECK(run("verify --mode slow" + o) == 1);
  CHECK(run("beta-table --config " + (d / "missing.json").string() + o) == 1);
}

TEST_CASE("aronsson profile") {
  const fs::path d = scratch("aronsson");
  REQUIRE(run("aronsson --p 4 --L 1 --samples 201 --out-dir " + d.string()) == 0);
  const json j = json::parse(slurp(d / "aronsson.json"));
  CHECK(std::abs(j["kappa"].get<double>() - (-1.0 + 2.0 * std::sqrt(7.0)) / 9.0) < 1e-10);
  CHECK(j["energy_identity_residual"].get<double>() < 1e-12);
  CHECK(j["separation_spread"].get<double>() < 1e-10);
  const auto rows = csv(d / "aronsson_profile.csv");
  CHECK(rows.size() == 202);
  CHECK(rows[0] == std::vector<std::string>{"theta", "phi", "f", "fprime", "g"});
}

TEST_CASE("solve, analyze and byte-identical reruns") {
  const fs::path a = scratch("solve_a");
  const fs::path b = scratch("solve_b");
  REQUIRE(run(std::string("solve ") + kSmallSolve + " --out-dir " + a.string()) == 0);
  REQUIRE(run(std::string("solve ") + kSmallSolve + " --out-dir " + b.string()) == 0);
  for (const char* f : {"field.txt", "field.csv", "field.json"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const json sidecar = json::parse(slurp(a / "field.json"));
  CHECK(sidecar["converged"] == true);
  CHECK(sidecar["stages"].size() == 2);

  const fs::path an = scratch("analyze");
  REQUIRE(run("analyze --checkpoint " + (a / "field.txt").string() + " --window-lo 2 --window-hi 16 --budget 256 --out-dir " +
              an.string()) == 0);
  const json fit = json::parse(slurp(an / "fit.json"));
  CHECK(fit.contains("beta_hat"));
  CHECK(fit.contains("beta_p"));
  CHECK(fit.contains("beta_hat_minus_beta_p"));
  CHECK(fit["morrey"]["C_estimate"].get<double>() > 0.0);
  CHECK(csv(an / "decay_profile.csv")[0] == std::vector<std::string>{"r", "S_r"});
  CHECK(csv(an / "gradient_profile.csv")[0] == std::vector<std::string>{"r", "G_r"});
  CHECK(fs::exists(an / "barrier.json"));

  std::ofstream(a / "broken.txt") << "morrey-field 1\np 4\ngrid 0.125 64\n";
  CHECK(run("analyze --checkpoint " + (a / "broken.txt").string() + " --out-dir " + an.string()) == 1);
}

TEST_CASE("non-convergence exits with 2 and keeps outputs") {
  const fs::path d = scratch("noconv");
  CHECK(run(std::string("solve ") + kSmallSolve + " --max-iters 1 --out-dir " + d.string()) == 2);
  CHECK(fs::exists(d / "field.txt"));
  CHECK(json::parse(slurp(d / "field.json"))["converged"] == false);
  CHECK(fs::exists(d / "manifest.json"));
}

TEST_CASE("verify and its negative control") {
  const fs::path d = scratch("verify");
  CHECK(run("verify --p 4 --mode quick --out-dir " + d.string()) == 0);
  CHECK(json::parse(slurp(d / "verify.json"))["passed"] == true);
  CHECK(run("verify --p 4 --mode quick --inject-fault --out-dir " + d.string()) == 3);
  CHECK(json::parse(slurp(d / "verify.json"))["passed"] == false);
}

TEST_CASE("config file: flags win and the file round-trips") {
  const fs::path d = scratch("config");
  std::ofstream(d / "in.json") << R"({"p": 5, "p_values": [3, 5], "samples": 11})";
  REQUIRE(run("beta-table --config " + (d / "in.json").string() + " --p 6 --out-dir " + d.string()) == 0);
  const morreylab::RunConfig used = morreylab::load_config((d / "config.json").string());
  CHECK(used.p == 6.0);
  CHECK(used.p_values == std::vector<double>{3.0, 5.0});
  CHECK(used.samples == 11);
  CHECK(csv(d / "beta_table.csv").size() == 3);

  const morreylab::RunConfig again = morreylab::from_json(morreylab::to_json(used));
  CHECK(again == used);
  CHECK(morreylab::to_json(again).dump() == morreylab::to_json(used).dump());

  morreylab::RunConfig odd;
  odd.kappa = 0.1 + 0.2;
  odd.eps_schedule = {1.0 / 3.0, 1e-300};
  odd.r_min = std::nextafter(0.25, 1.0);
  CHECK(morreylab::from_json(json::parse(morreylab::to_json(odd).dump())) == odd);

  CHECK_THROWS_AS(morreylab::from_json(json{{"bogus", 1}}), morreylab::ConfigError);
  CHECK_THROWS_AS(morreylab::from_json(json{{"p", "four"}}), morreylab::ConfigError);
}

}  // TEST_SUITE
