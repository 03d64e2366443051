// covlab: run, reproduce and verify the covering and energy experiments.
//
// Exit codes: 0 every check passed, 1 a check failed, 2 usage or config
// error, 3 resource cap exceeded.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "covlab/dyadic.hpp"
#include "covlab/experiments.hpp"

namespace fs = std::filesystem;
using covlab::exp::json;

namespace {

enum Exit { kPass = 0, kFailed = 1, kUsage = 2, kResource = 3 };

std::string known_scenarios() {
  std::string out;
  for (const auto& s : covlab::exp::scenario_registry()) out += (out.empty() ? "" : ", ") + s.name;
  return out;
}

fs::path default_out_root() {
  const char* env = std::getenv("COVLAB_OUT");
  return env && *env ? fs::path(env) : fs::path("runs");
}

int execute(const json& config, const fs::path& out, int jobs) {
  covlab::exp::RunOptions options;
  options.jobs = jobs;
  const auto report = covlab::exp::run_scenario(config, options);
  covlab::exp::write_run(out, config, report);
  for (const auto& c : report.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  std::cout << "wrote " << out.string() << "\n";
  return report.passed() ? kPass : kFailed;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw covlab::exp::ConfigError("config: cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw covlab::exp::ConfigError("config: " + p.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covlab: random covering and energy experiments on the torus"};
  app.require_subcommand(1);
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out_dir;
  app.add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out,-o", out_dir, "run directory (default $COVLAB_OUT/<scenario> or runs/<scenario>)");

  auto* list = app.add_subcommand("list", "list scenarios");
  bool list_json = false;
  list->add_flag("--json", list_json, "machine-readable listing");

  auto* reproduce = app.add_subcommand("reproduce", "run a scenario with its default config");
  std::string name;
  std::vector<double> alphas;
  int ratio = 0;
  int seeds = 0;
  reproduce->add_option("scenario", name, "scenario name")->required();
  reproduce->add_option("--alpha", alphas, "override the alpha grid");
  reproduce->add_option("--ratio", ratio, "largest side ratio for two-cubes");
  reproduce->add_option("--seeds", seeds, "number of seeds")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "run a scenario from a config file");
  std::string config_path;
  run->add_option("--config,-c", config_path, "config JSON")->required();

  auto* show = app.add_subcommand("config", "print the default config of a scenario");
  std::string show_name;
  show->add_option("scenario", show_name, "scenario name")->required();

  auto* manifest = app.add_subcommand("manifest", "rewrite manifest.json for a run directory");
  std::string manifest_dir;
  manifest->add_option("dir", manifest_dir, "run directory")->required();

  auto* verify = app.add_subcommand("verify", "check a run directory against its manifest");
  std::string verify_dir;
  verify->add_option("dir", verify_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  auto out_for = [&](const std::string& scenario) {
    return out_dir.empty() ? default_out_root() / scenario : fs::path(out_dir);
  };

  try {
    if (*list) {
      if (list_json) {
        json arr = json::array();
        for (const auto& s : covlab::exp::scenario_registry()) arr.push_back({{"name", s.name}, {"description", s.description}});
        std::cout << arr.dump(2) << "\n";
      } else {
        for (const auto& s : covlab::exp::scenario_registry()) std::cout << s.name << "\t" << s.description << "\n";
      }
      return kPass;
    }
    if (*show) {
      std::cout << covlab::exp::resolve_config(show_name).dump(2) << "\n";
      return kPass;
    }
    if (*reproduce) {
      json patch = json::object();
      if (!alphas.empty()) patch["params"]["alphas"] = alphas;
      if (ratio > 0) patch["params"]["max_ratio"] = ratio;
      if (seeds > 0) patch["seeds"] = seeds;
      const json config = covlab::exp::resolve_config(name, patch);
      return execute(config, out_for(name), jobs);
    }
    if (*run) {
      const json config = read_json(config_path);
      const std::string scenario = config.is_object() ? config.value("scenario", "") : "";
      return execute(config, out_for(scenario.empty() ? "run" : scenario), jobs);
    }
    if (*manifest) {
      covlab::exp::emit_manifest(manifest_dir);
      std::cout << "wrote " << (fs::path(manifest_dir) / "manifest.json").string() << "\n";
      return kPass;
    }
    if (*verify) {
      const auto r = covlab::exp::verify_run(verify_dir);
      for (const auto& p : r.problems) std::cout << "MISMATCH " << p << "\n";
      std::cout << (r.ok ? "verified " : "verification failed: ") << verify_dir << "\n";
      return r.ok ? kPass : kFailed;
    }
  } catch (const covlab::exp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    if (std::string(e.what()).find("unknown scenario") != std::string::npos) {
      std::cerr << "known scenarios: " << known_scenarios() << "\n";
    }
    return kUsage;
  } catch (const covlab::ResourceLimitError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return kResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
