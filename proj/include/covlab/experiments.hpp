#pragma once

// Scenario runner: JSON configs in, CSV tables + summary.json + manifest out.
// Every table and summary is a pure function of the config; wall-clock data
// goes only to the run.log sidecar.

#include <cstdint>
#include <filesystem>
#include <functional>
#include "json.hpp"
#include <stdexcept>
#include <string>
#include <vector>

namespace covlab::exp {

using nlohmann::json;

/// Invalid configuration; what() names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Table {
  std::string name;  ///< file stem; written as <name>.csv
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::string csv() const;
};

/// Shortest round-trip decimal form, so CSV bytes depend only on the value.
std::string num(double v);
std::string num(std::int64_t v);
std::string num(std::uint64_t v);
inline std::string num(int v) { return num(static_cast<std::int64_t>(v)); }

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
  json data = json::object();
};

struct ScenarioReport {
  std::string scenario;
  json results = json::object();
  std::vector<Table> tables;
  std::vector<Check> checks;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> log;  ///< timing and progress lines, run.log only

  bool passed() const;
  const Check* find(const std::string& name) const;
};

struct RunOptions {
  int jobs = 1;
  std::function<void(const std::string&)> progress;  ///< optional live log sink
};

struct ScenarioInfo {
  std::string name;
  std::string description;
  std::function<json()> defaults;
  std::function<ScenarioReport(const json& config, const RunOptions&)> run;
};

const std::vector<ScenarioInfo>& scenario_registry();
const ScenarioInfo* find_scenario(const std::string& name);

/// Default config merged with `overrides` (RFC 7386 merge patch).
json resolve_config(const std::string& name, const json& overrides = json::object());
/// Validates and runs config["scenario"]. Throws ConfigError on bad fields
/// and ResourceLimitError when a cap is hit.
ScenarioReport run_scenario(const json& config, const RunOptions& options = {});

/// SHA-256 of bytes, lowercase hex.
std::string sha256_hex(const std::string& bytes);
/// Hash of the canonical (sorted-key, compact) config dump.
std::string config_hash(const json& config);

/// Writes config.json, summary.json, <table>.csv, run.log and manifest.json.
void write_run(const std::filesystem::path& dir, const json& config, const ScenarioReport& report);

/// Rewrites manifest.json for an existing run directory.
json emit_manifest(const std::filesystem::path& dir);

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Recomputes every checksum recorded in the manifest.
VerifyResult verify_run(const std::filesystem::path& dir);

std::string library_version();

}  // namespace covlab::exp
