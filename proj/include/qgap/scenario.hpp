#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace qgap {

using Report = nlohmann::ordered_json;

const std::vector<std::string>& scenario_names();

// `key = value` lines with optional [section] headers; keys inside a section
// are addressed as "section.key".
struct ScenarioConfig {
  std::string scenario;
  std::filesystem::path base_dir = ".";
  std::map<std::string, std::string> values;
  std::uint64_t seed = 0;
  int threads = 1;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::filesystem::path path(const std::string& key) const;  // resolved against base_dir
};

ScenarioConfig parse_config(std::istream& is, const std::filesystem::path& base_dir = ".");
ScenarioConfig load_config(const std::filesystem::path& path);

// Rejects unknown keys and missing input files before any work is done.
void validate_config(const ScenarioConfig& config);

struct ScenarioResult {
  Report report;
  bool pass = false;
};

ScenarioResult run_scenario(const ScenarioConfig& config);

std::string report_text(const Report& report);

// One row per report; columns are the statistics of the first report.
std::string emit_table(const std::vector<Report>& reports, const std::vector<std::string>& names);

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace qgap
