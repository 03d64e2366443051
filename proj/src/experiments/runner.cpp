#include "common.hpp"

namespace covlab::exp {

const std::vector<ScenarioInfo>& scenario_registry() {
  // Listing order is the registry order; keep it stable.
  static const std::vector<ScenarioInfo> registry = {
      {"shrinking-balls", "box dimension of random ball coverings r_n = n^-alpha against 1/alpha",
       shrinking_balls_defaults, run_shrinking_balls},
      {"rectangles", "G_lower of a x b rectangles against a^s and a b^(s-1)", rectangles_defaults, run_rectangles},
      {"two-cubes", "G_lower / g for a full cube plus a rarefied cube, over the side ratio", two_cubes_defaults,
       run_two_cubes},
      {"fat-cantor", "fat Cantor generators: covering dimension and Lebesgue-density interaction", fat_cantor_defaults,
       run_fat_cantor},
      {"packing-saturation", "N*-saturation of a target set by divergent ball schedules", packing_defaults,
       run_packing},
      {"gauge-ball", "G_lower of balls under h(r) = r^d (log r)^2 against h(r)/|log r|", gauge_ball_defaults,
       run_gauge_ball},
      {"gamma-suite", "minimal regular energy: QP oracle, monotonicity, positivity, content bound",
       gamma_suite_defaults, run_gamma_suite},
      {"ball-energy", "scaling law I_s(B(r)) r^s / L(B(r))^2 across radii", ball_energy_defaults, run_ball_energy},
      {"critical-exponent", "critical exponent of sum n^(-alpha t) against 1/alpha", critical_defaults, run_critical},
      {"content-suite", "dyadic content upper bound dominates G_lower on random sets", content_suite_defaults,
       run_content_suite},
      {"leb-split", "measure-fraction thinning with the 2p^2 energy bound on random sets", leb_split_defaults,
       run_leb_split},
      {"nonlinear-consistency", "nonlinear displacement: dimension shift over an eps ladder and inverse recovery",
       nonlinear_defaults, run_nonlinear},
  };
  return registry;
}

const ScenarioInfo* find_scenario(const std::string& name) {
  for (const auto& s : scenario_registry()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

json resolve_config(const std::string& name, const json& overrides) {
  const ScenarioInfo* info = find_scenario(name);
  if (!info) throw ConfigError("scenario: unknown scenario '" + name + "'");
  json config = info->defaults();
  config.merge_patch(overrides);
  config["scenario"] = name;
  return config;
}

ScenarioReport run_scenario(const json& config, const RunOptions& options) {
  if (!config.is_object()) throw ConfigError("config: expected a JSON object");
  if (!config.contains("scenario") || !config["scenario"].is_string()) throw ConfigError("scenario: missing");
  const std::string name = config["scenario"].get<std::string>();
  const ScenarioInfo* info = find_scenario(name);
  if (!info) throw ConfigError("scenario: unknown scenario '" + name + "'");
  Stopwatch clock;
  ScenarioReport report = info->run(config, options);
  report.scenario = name;
  report.log.push_back("scenario " + name + " finished in " + std::to_string(clock.seconds()) + " s");
  return report;
}

}  // namespace covlab::exp
