#include <filesystem>
#include <fstream>

#include "covlab/experiments.hpp"
#include "doctest.h"

using namespace covlab::exp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("covlab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("registry lists the required scenarios with valid defaults") {
  for (const char* name : {"shrinking-balls", "rectangles", "two-cubes", "fat-cantor", "packing-saturation",
                           "gauge-ball", "gamma-suite"}) {
    REQUIRE(find_scenario(name) != nullptr);
  }
  for (const auto& s : scenario_registry()) {
    const json c = resolve_config(s.name);
    CHECK(c["scenario"] == s.name);
    CHECK(c.contains("params"));
    CHECK(c.contains("thresholds"));
  }
  CHECK_THROWS_AS(resolve_config("no-such"), ConfigError);
}

TEST_CASE("config errors name the field") {
  auto message = [](const json& c) {
    try {
      run_scenario(c);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  json c = resolve_config("critical-exponent");
  c["params"]["alphas"][1] = "two";
  CHECK(message(c).find("params.alphas[1]") != std::string::npos);
  c = resolve_config("critical-exponent");
  c["params"]["typo"] = 1;
  CHECK(message(c).find("params.typo: unknown field") != std::string::npos);
  c = resolve_config("critical-exponent");
  c["thresholds"].erase("tolerance");
  CHECK(message(c).find("thresholds.tolerance: missing") != std::string::npos);
  c = resolve_config("shrinking-balls");
  c["seeds"] = 0;
  CHECK(message(c).find("seeds") != std::string::npos);
  CHECK(message(json::array()).find("config") != std::string::npos);
}

TEST_CASE("merge patch overrides nested fields only") {
  const json c = resolve_config("shrinking-balls", {{"params", {{"alphas", {2.0}}}}, {"seeds", 3}});
  CHECK(c["params"]["alphas"] == json::array({2.0}));
  CHECK(c["seeds"] == 3);
  CHECK(c["params"]["block_ratio"] == 4.0);
}

TEST_CASE("numbers print in shortest round-trip form") {
  CHECK(num(0.1) == "0.1");
  CHECK(num(1.0) == "1");
  CHECK(num(1e-300) == "1e-300");
  CHECK(std::stod(num(2.0 / 3.0)) == 2.0 / 3.0);
  Table t{"t", {"a", "b"}, {}};
  t.add({"1", "x,y"});
  CHECK(t.csv() == "a,b\n1,\"x,y\"\n");
  CHECK_THROWS(t.add({"1"}));
}

TEST_CASE("sha256 matches the standard test vector") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("run directories verify and detect tampering") {
  const fs::path dir = scratch("manifest");
  const json config = resolve_config("gauge-ball");
  const ScenarioReport rep = run_scenario(config);
  write_run(dir, config, rep);
  for (const char* f : {"config.json", "summary.json", "gauge_ball.csv", "run.log", "manifest.json"}) CHECK(fs::exists(dir / f));
  const json m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m["config_hash"] == config_hash(config));
  CHECK_FALSE(m["files"].contains("run.log"));
  CHECK(m["versions"].contains("fftw"));
  CHECK(verify_run(dir).ok);
  {
    std::ofstream(dir / "gauge_ball.csv", std::ios::app) << "tampered\n";
  }
  const VerifyResult bad = verify_run(dir);
  CHECK_FALSE(bad.ok);
  CHECK(bad.problems.front().find("gauge_ball.csv") != std::string::npos);
  emit_manifest(dir);
  CHECK(verify_run(dir).ok);
  std::ofstream(dir / "extra.csv") << "x\n";
  CHECK_FALSE(verify_run(dir).ok);
  CHECK_THROWS(emit_manifest(scratch("missing")));
  fs::remove_all(dir);
}

TEST_CASE("summary excludes timing and reruns are byte identical") {
  const json config = resolve_config("critical-exponent");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  write_run(a, config, run_scenario(config));
  RunOptions four;
  four.jobs = 4;
  write_run(b, config, run_scenario(config, four));
  for (const char* f : {"classifications.csv", "summary.json", "config.json"}) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(slurp(a / "summary.json").find("seconds") == std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("seeded scenarios do not depend on the worker count") {
  json config = resolve_config("gamma-suite", {{"seeds", 6}, {"params", {{"oracle_sets", 2}}}});
  RunOptions one, three;
  three.jobs = 3;
  const ScenarioReport r1 = run_scenario(config, one), r3 = run_scenario(config, three);
  REQUIRE(r1.tables.size() == r3.tables.size());
  for (std::size_t i = 0; i < r1.tables.size(); ++i) CHECK(r1.tables[i].csv() == r3.tables[i].csv());
  CHECK(r1.seeds == r3.seeds);
}
