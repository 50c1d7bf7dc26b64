#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qgap/scenario.hpp"

namespace {

int write_text(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) {
    std::cerr << "qgap: cannot write " << out << '\n';
    return 2;
  }
  f << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qgap: numerical checks for gapped verifier and Hamiltonian constructions"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "scenario config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "report path (default stdout)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed, overrides the config");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--set", sets, "override a config value, key=value");

  for (const auto& name : qgap::scenario_names()) app.add_subcommand(name, "run the " + name + " scenario");

  std::vector<std::string> report_paths;
  auto* table = app.add_subcommand("table", "summarize reports of one scenario as CSV");
  table->add_option("reports", report_paths, "report files")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (table->parsed()) {
      std::vector<qgap::Report> reports;
      for (const auto& p : report_paths) {
        std::ifstream in(p);
        reports.push_back(qgap::Report::parse(in));
      }
      return write_text(out_path, qgap::emit_table(reports, report_paths));
    }

    const std::string name = app.get_subcommands().front()->get_name();
    qgap::ScenarioConfig cfg;
    if (!config_path.empty()) cfg = qgap::load_config(config_path);
    if (!cfg.scenario.empty() && cfg.scenario != name)
      throw std::invalid_argument("config is for scenario '" + cfg.scenario + "', not '" + name + "'");
    cfg.scenario = name;
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
      cfg.values[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (seed_opt->count()) cfg.seed = seed;
    cfg.threads = threads;

    const qgap::ScenarioResult res = qgap::run_scenario(cfg);
    const int rc = write_text(out_path, qgap::report_text(res.report));
    if (rc != 0) return rc;
    if (!res.pass) std::cerr << "qgap: " << name << ": invariant FAIL\n";
    return res.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "qgap: " << e.what() << '\n';
    return 2;
  }
}
