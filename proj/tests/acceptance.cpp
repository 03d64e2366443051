// Acceptance run: one PASS/FAIL line per criterion. Every scenario is read
// from the checked-in scenario files, so thresholds come from there.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "covlab/experiments.hpp"

using namespace covlab::exp;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::string scenario;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string failed_checks(const ScenarioReport& r) {
  std::string out;
  for (const auto& c : r.checks) {
    if (!c.pass) out += (out.empty() ? "" : "; ") + c.name + ": " + c.detail;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path scenarios = argc > 1 ? fs::path(argv[1]) : fs::path(COVLAB_SCENARIO_DIR);
  const fs::path work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "covlab_acceptance";
  fs::remove_all(work);
  RunOptions opt;
  opt.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  const std::vector<Criterion> criteria = {
      {1, "shrinking-ball dimension formula", "shrinking-balls"},
      {2, "critical exponent estimator", "critical-exponent"},
      {3, "packing saturation", "packing-saturation"},
      {4, "ball energy law", "ball-energy"},
      {5, "rectangle comparabilities", "rectangles"},
      {6, "G/g growth for the two-cubes example", "two-cubes"},
      {7, "content dominates G_lower", "content-suite"},
      {8, "measure-fraction splitting", "leb-split"},
      {9, "minimal regular energy suite", "gamma-suite"},
      {10, "log-gauge ball comparability", "gauge-ball"},
      {11, "nonlinear displacement consistency", "nonlinear-consistency"},
  };

  int failures = 0;
  std::map<std::string, fs::path> runs;
  auto run_file = [&](const std::string& name) -> ScenarioReport {
    const json config = json::parse(slurp(scenarios / (name + ".json")));
    ScenarioReport r = run_scenario(config, opt);
    write_run(work / name, config, r);
    runs[name] = work / name;
    return r;
  };

  for (const Criterion& c : criteria) {
    std::string detail;
    bool pass = false;
    try {
      const ScenarioReport r = run_file(c.scenario);
      pass = r.passed();
      detail = pass ? std::to_string(r.checks.size()) + " checks passed" : failed_checks(r);
    } catch (const std::exception& e) {
      detail = std::string("error: ") + e.what();
    }
    failures += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "): " << detail << std::endl;
  }

  // 12: every scenario, rerun from the config recorded in its run directory,
  // must reproduce its tables byte for byte.
  {
    std::vector<std::string> problems;
    try {
      for (const auto& s : scenario_registry()) {
        if (!runs.count(s.name)) run_file(s.name);
      }
      for (const auto& [name, dir] : runs) {
        if (!verify_run(dir).ok) problems.push_back(name + ": manifest check failed");
        const json config = json::parse(slurp(dir / "config.json"));
        const ScenarioReport again = run_scenario(config, opt);
        for (const Table& t : again.tables) {
          if (slurp(dir / (t.name + ".csv")) != t.csv()) problems.push_back(name + "/" + t.name + ".csv differs");
        }
      }
    } catch (const std::exception& e) {
      problems.push_back(std::string("error: ") + e.what());
    }
    const bool pass = problems.empty();
    failures += !pass;
    std::string detail = pass ? std::to_string(runs.size()) + " scenarios reproduced byte-identical tables" : "";
    for (const auto& p : problems) detail += (detail.empty() ? "" : "; ") + p;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion 12 (determinism): " << detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
