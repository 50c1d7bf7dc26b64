#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qgap/scenario.hpp"

using namespace qgap;
namespace fs = std::filesystem;

namespace {

const fs::path kData = QGAP_DATA_DIR;
const std::string kCli = QGAP_CLI_PATH;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = kCli + " " + args + " --out " + out.string() + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qgap_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

ScenarioConfig config_of(const std::string& name) {
  ScenarioConfig cfg = load_config(kData / "configs" / name);
  return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in("scenario = power-decide\nseed = 42\nc = 0.8\n\n[random]\nw = 2\nkind = yes\n");
  ScenarioConfig cfg = parse_config(in, "/tmp");
  CHECK(cfg.scenario == "power-decide");
  CHECK(cfg.seed == 42);
  CHECK(cfg.get_double("c", 0) == 0.8);
  CHECK(cfg.get_int("random.w", 0) == 2);
  CHECK(cfg.get("random.kind", "") == "yes");
  CHECK_THROWS_AS(cfg.path("circuit"), std::invalid_argument);
  cfg.values["circuit"] = "x.circ";
  CHECK(cfg.path("circuit") == fs::path("/tmp/x.circ"));

  std::istringstream bad("c = 1\n[random\n");
  CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("config line 2"), std::invalid_argument);
  std::istringstream neg("seed = -3\n");
  CHECK_THROWS_AS(parse_config(neg), std::invalid_argument);

  ScenarioConfig typo;
  typo.scenario = "power-decide";
  typo.values["cc"] = "0.9";
  CHECK_THROWS_WITH_AS(validate_config(typo), doctest::Contains("'cc'"), std::invalid_argument);
  ScenarioConfig missing;
  missing.scenario = "tm-graph";
  missing.values["tm"] = "/nonexistent/machine.tm";
  CHECK_THROWS_WITH_AS(validate_config(missing), doctest::Contains("does not exist"), std::invalid_argument);
  ScenarioConfig unknown;
  unknown.scenario = "bogus";
  CHECK_THROWS_AS(validate_config(unknown), std::invalid_argument);
  ScenarioConfig number;
  number.scenario = "power-decide";
  number.values["c"] = "0.9x";
  CHECK_THROWS_WITH_AS(run_scenario(number), doctest::Contains("not a number"), std::invalid_argument);
}

TEST_CASE("bundled scenarios") {
  SUBCASE("accept-always clock spectrum") {
    ScenarioResult r = run_scenario(config_of("clock_accept_always.ini"));
    CHECK(r.pass);
    CHECK(std::abs(r.report["statistics"]["E1"].get<double>()) <= 1e-10);
    CHECK(r.report["status"] == "PASS");
    CHECK(r.report["constants"]["sw_truncation"] == 10.0);
    CHECK(r.report["constants"]["taylor_remainder"] == 4.0);
    CHECK(r.report["constants"]["gap_fit"] == 0.1);
  }
  SUBCASE("NO-instance machine") {
    ScenarioResult r = run_scenario(config_of("tm_no.ini"));
    CHECK(r.pass);
    CHECK(r.report["statistics"]["outcome"] == "reject");
    CHECK(std::abs(r.report["statistics"]["E1"].get<double>()) <= 1e-12);
  }
  SUBCASE("YES-instance machine") {
    ScenarioResult r = run_scenario(config_of("tm_yes.ini"));
    CHECK(r.pass);
    CHECK(r.report["statistics"]["outcome"] == "accept");
  }
  SUBCASE("module errors surface verbatim") {
    ScenarioConfig cfg = config_of("power_decide.ini");
    cfg.values["s"] = "0.2";
    cfg.values["g1"] = "0.3";
    cfg.values["g2"] = "0.3";
    CHECK_THROWS_WITH_AS(run_scenario(cfg), doctest::Contains("promise unsatisfiable"), std::invalid_argument);
  }
  SUBCASE("digest tracks inputs") {
    ScenarioConfig cfg = config_of("phase_est.ini");
    const std::string d1 = run_scenario(cfg).report["inputs_digest"];
    cfg.seed += 1;
    const std::string d2 = run_scenario(cfg).report["inputs_digest"];
    CHECK(d1 != d2);
    CHECK(d1.rfind("fnv1a64:", 0) == 0);
  }
}

TEST_CASE("fnv1a") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("emit_table") {
  SUBCASE("empty list") { CHECK(emit_table({}, {}) == "report\n"); }
  SUBCASE("two clock reports") {
    ScenarioConfig cfg = config_of("clock_accept_always.ini");
    Report a = run_scenario(cfg).report;
    cfg.values["epsilon"] = "2e-4";
    Report b = run_scenario(cfg).report;
    const std::string csv = emit_table({a, b}, {"a.json", "b.json"});
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.rfind("report,qubits,T,", 0) == 0);
  }
  SUBCASE("mixed scenarios") {
    Report a = run_scenario(config_of("clock_accept_always.ini")).report;
    Report b = run_scenario(config_of("tm_no.ini")).report;
    CHECK_THROWS_WITH_AS(emit_table({a, b}, {"a", "b"}), doctest::Contains("mixed"), std::invalid_argument);
  }
  SUBCASE("epsilon sweep") {
    ScenarioConfig cfg;
    cfg.scenario = "clock-spectrum";
    cfg.seed = 11;
    cfg.values["random.m"] = "2";
    cfg.values["random.w"] = "2";
    cfg.values["random.gates"] = "5";
    std::vector<Report> reports;
    std::vector<std::string> names;
    for (const char* eps : {"1e-5", "2e-5", "4e-5", "8e-5", "1.6e-4"}) {
      cfg.values["epsilon"] = eps;
      reports.push_back(run_scenario(cfg).report);
      names.push_back(eps);
    }
    std::istringstream csv(emit_table(reports, names));
    std::string header, line;
    std::getline(csv, header);
    int e1_col = 0;
    {
      std::istringstream h(header);
      std::string cell;
      for (int i = 0; std::getline(h, cell, ','); ++i)
        if (cell == "E1") e1_col = i;
    }
    REQUIRE(e1_col > 0);
    std::vector<double> e1;
    while (std::getline(csv, line)) {
      std::istringstream row(line);
      std::string cell;
      for (int i = 0; std::getline(row, cell, ','); ++i)
        if (i == e1_col) e1.push_back(std::stod(cell));
    }
    REQUIRE(e1.size() == 5);
    for (std::size_t i = 1; i < e1.size(); ++i) CHECK(e1[i] > e1[i - 1]);
    // first-order prediction eps (1 - lambda1) / (T + 1) is increasing in eps as well
    for (std::size_t i = 0; i < e1.size(); ++i) {
      const double lambda1 = reports[i]["statistics"]["lambda1"];
      const double eps = reports[i]["statistics"]["epsilon"];
      const int t = reports[i]["statistics"]["T"];
      CHECK(std::abs(e1[i] - eps * (1 - lambda1) / (t + 1)) <= reports[i]["bounds"]["tracking"].get<double>());
    }
  }
}

TEST_CASE("command line") {
  const fs::path cfg = kData / "configs" / "clock_accept_always.ini";
  const fs::path a = scratch("a.json"), b = scratch("b.json");
  CHECK(run_cli("clock-spectrum --config " + cfg.string(), a) == 0);
  CHECK(run_cli("clock-spectrum --config " + cfg.string(), b) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(run_cli("transforms --config " + (kData / "configs" / "transforms.ini").string(), a) == 1);
  CHECK(run_cli("tm-graph --config " + cfg.string(), a) == 2);
  CHECK(run_cli("power-decide --set cc=1", a) == 2);
  CHECK(run_cli("power-decide --seed 4 --set random.kind=yes", a) == 0);
  const fs::path t = scratch("table.csv");
  CHECK(run_cli("clock-spectrum --config " + cfg.string(), a) == 0);
  CHECK(run_cli("table " + a.string() + " " + a.string(), t) == 0);
  const std::string table = slurp(t);
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);
}
