#include <cmath>
#include <mutex>

#include "common.hpp"
#include "covlab/covering.hpp"
#include "covlab/critical.hpp"
#include "covlab/shapes.hpp"

namespace covlab::exp {

namespace {

struct CoveringParams {
  int dim = 1;
  double scale = 1.0;
  double max_radius = 0.1;
  std::uint64_t n_max = 100000;
  std::uint64_t block_first = 1;
  double block_ratio = 4.0;
  int level_cap = 18;
  BlockScale block_scale = BlockScale::largest;
  std::size_t fit_last = 3;
};

CoveringParams read_covering(Fields& p, bool with_dim = true) {
  CoveringParams c;
  if (with_dim) c.dim = static_cast<int>(p.integer("dim", 1, kMaxDim));
  c.scale = p.positive("scale");
  c.max_radius = p.positive("max_radius");
  c.n_max = static_cast<std::uint64_t>(p.integer("n_max", 1, 10000000));
  c.block_first = static_cast<std::uint64_t>(p.integer("block_first", 1, 1000000));
  c.block_ratio = p.positive("block_ratio");
  c.level_cap = static_cast<int>(p.integer("level_cap", 1, 24));
  c.block_scale = p.text("block_scale", {"smallest", "largest"}) == "largest" ? BlockScale::largest : BlockScale::smallest;
  c.fit_last = static_cast<std::size_t>(p.integer("fit_last", 0, 1000));
  return c;
}

json covering_defaults_json() {
  return {{"scale", 1.0},       {"max_radius", 0.1}, {"n_max", 100000},          {"block_first", 1},
          {"block_ratio", 4.0}, {"level_cap", 18},   {"block_scale", "largest"}, {"fit_last", 3}};
}

DisplacementFamily read_displacement(Fields p, int dim) {
  const std::string kind = p.text("kind", {"translation", "nonlinear"});
  const double eps = p.number("eps");
  const auto k = static_cast<int>(p.integer("frequency", 1, 64));
  p.finish();
  if (kind == "translation") return DisplacementFamily::translation(dim);
  try {
    return DisplacementFamily::nonlinear(dim, eps, k);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(p.path() + ": " + e.what());
  }
}

struct TrialResult {
  DimensionEstimate est;
  LimsupChain chain;
};

BlockPlan plan_for(const GeneratorSchedule& s, const CoveringParams& c) {
  const int cap = std::min(c.level_cap, max_level(s.dim));
  BlockPlan plan = uncapped_prefix(make_block_plan(s, c.block_first, c.block_ratio, cap, c.block_scale));
  if (plan.blocks() < 3) throw ConfigError("params: fewer than 3 uncapped blocks; raise level_cap or lower block_first");
  return plan;
}

TrialResult covering_trial(const GeneratorSchedule& s, const DisplacementFamily& disp, const BlockPlan& plan,
                           const CoveringParams& c, std::uint64_t seed) {
  const auto centers = sample_centers(SamplingDistribution::uniform(s.dim), plan.boundaries.back(), seed);
  TrialResult r;
  r.chain = truncated_limsup(centers, s, disp, plan);
  r.est = box_dimension_estimate(r.chain.stages, plan.levels, plan.boundaries, c.fit_last);
  return r;
}

GeneratorSchedule ball_schedule(const CoveringParams& c, double alpha) {
  GeneratorSchedule s = GeneratorSchedule::balls(c.dim, c.scale, alpha, c.n_max);
  s.max_radius = c.max_radius;
  return s;
}

void validate_schedule(const GeneratorSchedule& s, const DisplacementFamily& disp) {
  try {
    s.validate(disp);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
}

struct AlphaRun {
  std::vector<TrialResult> trials;
  BlockPlan plan;
  double seconds = 0.0;
};

AlphaRun run_alpha(const CoveringParams& c, const GeneratorSchedule& s, const DisplacementFamily& disp,
                   const std::vector<std::uint64_t>& seeds, const RunOptions& opt) {
  AlphaRun out;
  Stopwatch clock;
  out.plan = plan_for(s, c);
  out.trials.resize(seeds.size());
  parallel_for(seeds.size(), opt.jobs, [&](std::size_t i) { out.trials[i] = covering_trial(s, disp, out.plan, c, seeds[i]); });
  out.seconds = clock.seconds();
  return out;
}

std::vector<double> slopes(const AlphaRun& run) {
  std::vector<double> v;
  for (const auto& t : run.trials) v.push_back(t.est.value);
  return v;
}

void record_alpha(ScenarioReport& rep, Table& trials, Table& blocks, const std::string& tag, double alpha,
                  const AlphaRun& run, const std::vector<std::uint64_t>& seeds) {
  for (std::size_t i = 0; i < run.trials.size(); ++i) {
    const auto& t = run.trials[i];
    trials.add({tag, num(alpha), num(i), num(seeds[i]), num(run.plan.blocks()), num(t.est.value), num(t.est.raw_slope),
                num(t.est.r_squared), num(t.chain.empty_at)});
    for (std::size_t j = 0; j < run.plan.blocks(); ++j) {
      blocks.add({tag, num(alpha), num(i), num(j + 1), num(run.plan.boundaries[j] + 1), num(run.plan.boundaries[j + 1]),
                  num(run.plan.levels[j]), num(count_positive_cells(t.chain.stages[j], run.plan.levels[j])),
                  num(t.chain.survival[j])});
    }
  }
  rep.log.push_back(tag + " alpha=" + num(alpha) + ": " + std::to_string(run.seconds) + " s");
}

Table trials_table() {
  return Table{"trials", {"family", "alpha", "trial", "seed", "blocks", "slope", "raw_slope", "r_squared", "empty_at"}, {}};
}

Table blocks_table() {
  return Table{"blocks", {"family", "alpha", "trial", "block", "n_first", "n_last", "level", "count", "chain_measure"}, {}};
}

}  // namespace

json shrinking_balls_defaults() {
  json p = covering_defaults_json();
  p["dim"] = 1;
  p["alphas"] = {1.5, 2.0, 3.0};
  p["displacement"] = {{"kind", "translation"}, {"eps", 0.0}, {"frequency", 1}};
  return {{"scenario", "shrinking-balls"},
          {"seeds", 20},
          {"master_seed", 20240601},
          {"params", p},
          {"thresholds", {{"tolerance", 0.15}, {"max_seconds_per_alpha", 300.0}}}};
}

ScenarioReport run_shrinking_balls(const json& config, const RunOptions& opt) {
  const Common common = read_common(config, true);
  Fields p(config.at("params"), "params");
  const CoveringParams c = read_covering(p);
  const auto alphas = p.numbers("alphas");
  const DisplacementFamily disp = read_displacement(p.object("displacement"), c.dim);
  p.finish();
  Fields th(config.at("thresholds"), "thresholds");
  const double tol = th.positive("tolerance");
  const double max_seconds = th.positive("max_seconds_per_alpha");
  th.finish();

  ScenarioReport rep;
  rep.seeds = common.seeds;
  Table trials = trials_table();
  Table blocks = blocks_table();
  rep.results["per_alpha"] = json::array();
  for (double alpha : alphas) {
    if (!(alpha > 0.0)) throw ConfigError("params.alphas: entries must be positive");
    const GeneratorSchedule s = ball_schedule(c, alpha);
    validate_schedule(s, disp);
    const AlphaRun run = run_alpha(c, s, disp, common.seeds, opt);
    record_alpha(rep, trials, blocks, disp.describe(), alpha, run, common.seeds);
    const auto v = slopes(run);
    const double med = median(v);
    const double target = std::min(static_cast<double>(c.dim), 1.0 / alpha);
    rep.results["per_alpha"].push_back({{"alpha", alpha},
                                        {"target", target},
                                        {"median", med},
                                        {"min", *std::min_element(v.begin(), v.end())},
                                        {"max", *std::max_element(v.begin(), v.end())},
                                        {"levels", run.plan.levels},
                                        {"boundaries", run.plan.boundaries}});
    add_check(rep, "median alpha=" + num(alpha), std::abs(med - target) <= tol,
              "median " + num(med) + " vs 1/alpha " + num(target) + " (tolerance " + num(tol) + ")",
              {{"median", med}, {"target", target}, {"tolerance", tol}});
    add_check(rep, "runtime alpha=" + num(alpha), run.seconds <= max_seconds,
              "wall time within " + num(max_seconds) + " s (see run.log)", {{"limit_seconds", max_seconds}});
  }
  rep.tables = {std::move(trials), std::move(blocks)};
  return rep;
}

json nonlinear_defaults() {
  json p = covering_defaults_json();
  p["dim"] = 1;
  p["alphas"] = {1.5, 2.0, 3.0};
  p["eps_ladder"] = {0.05, 0.02, 0.01, 0.0};
  p["frequency"] = 1;
  p["check_eps"] = 0.02;
  p["inverse_samples"] = 10000;
  return {{"scenario", "nonlinear-consistency"},
          {"seeds", 20},
          {"master_seed", 20240601},
          {"params", p},
          {"thresholds", {{"max_shift", 0.05}, {"max_recovery_error", 1e-10}, {"derivative_slack", 1e-6}}}};
}

ScenarioReport run_nonlinear(const json& config, const RunOptions& opt) {
  const Common common = read_common(config, true);
  Fields p(config.at("params"), "params");
  const CoveringParams c = read_covering(p);
  const auto alphas = p.numbers("alphas");
  const auto ladder = p.numbers("eps_ladder");
  const auto k = static_cast<int>(p.integer("frequency", 1, 64));
  const double check_eps = p.number("check_eps");
  const auto inverse_samples = static_cast<std::size_t>(p.integer("inverse_samples", 1, 10000000));
  p.finish();
  Fields th(config.at("thresholds"), "thresholds");
  const double max_shift = th.positive("max_shift");
  const double max_err = th.positive("max_recovery_error");
  const double slack = th.number("derivative_slack");
  th.finish();
  if (std::find(ladder.begin(), ladder.end(), check_eps) == ladder.end()) {
    throw ConfigError("params.check_eps: must be one of params.eps_ladder");
  }
  auto family = [&](double eps) {
    try {
      return DisplacementFamily::nonlinear(c.dim, eps, k);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("params.eps_ladder: ") + e.what());
    }
  };

  ScenarioReport rep;
  rep.seeds = common.seeds;
  Table trials = trials_table();
  Table blocks = blocks_table();
  Table ladder_table{"ladder", {"alpha", "eps", "median", "shift"}, {}};
  rep.results["per_alpha"] = json::array();
  for (double alpha : alphas) {
    const GeneratorSchedule s = ball_schedule(c, alpha);
    const DisplacementFamily base = DisplacementFamily::translation(c.dim);
    validate_schedule(s, base);
    const AlphaRun ref = run_alpha(c, s, base, common.seeds, opt);
    record_alpha(rep, trials, blocks, base.describe(), alpha, ref, common.seeds);
    const double ref_med = median(slopes(ref));
    json row = {{"alpha", alpha}, {"translation_median", ref_med}, {"ladder", json::array()}};
    for (double eps : ladder) {
      const DisplacementFamily disp = family(eps);
      validate_schedule(s, disp);
      const AlphaRun run = run_alpha(c, s, disp, common.seeds, opt);
      record_alpha(rep, trials, blocks, disp.describe(), alpha, run, common.seeds);
      const double med = median(slopes(run));
      const double shift = med - ref_med;
      ladder_table.add({num(alpha), num(eps), num(med), num(shift)});
      row["ladder"].push_back({{"eps", eps}, {"median", med}, {"shift", shift}});
      if (eps == check_eps) {
        add_check(rep, "shift alpha=" + num(alpha) + " eps=" + num(eps), std::abs(shift) <= max_shift,
                  "median " + num(med) + " vs translation " + num(ref_med) + " (max shift " + num(max_shift) + ")",
                  {{"shift", shift}, {"max_shift", max_shift}});
      }
    }
    rep.results["per_alpha"].push_back(row);
  }

  Table inverse{"inverse", {"family", "samples", "max_error", "failures", "max_inverse_derivative", "bound"}, {}};
  for (const DisplacementFamily& disp : {DisplacementFamily::translation(c.dim), family(check_eps)}) {
    const InverseFamilyReport r = verify_inverse_family(disp, inverse_samples, trial_seed(common.master_seed, 1u << 20));
    inverse.add({disp.describe(), num(r.samples), num(r.max_error), num(r.failures), num(r.max_inverse_derivative), num(r.bound)});
    add_check(rep, "inverse recovery " + disp.describe(), r.failures == 0 && r.max_error < max_err,
              "max |x_hat - x| " + num(r.max_error) + ", " + num(r.failures) + " failed solves",
              {{"max_error", r.max_error}, {"failures", r.failures}, {"limit", max_err}});
    add_check(rep, "inverse derivative " + disp.describe(), r.max_inverse_derivative <= r.bound + slack,
              "max norm " + num(r.max_inverse_derivative) + " vs C^2 = " + num(r.bound),
              {{"max_norm", r.max_inverse_derivative}, {"bound", r.bound}});
  }
  rep.tables = {std::move(trials), std::move(blocks), std::move(ladder_table), std::move(inverse)};
  return rep;
}

json packing_defaults() {
  return {{"scenario", "packing-saturation"},
          {"seeds", 20},
          {"master_seed", 20240602},
          {"params",
           {{"dims", {1, 2}},
            {"scale", 0.5},
            {"max_radius", 0.15},
            {"level", 6},
            {"n_max", 10000},
            {"n_start", 1},
            {"target", "full"},
            {"block_first", 1},
            {"block_ratio", 4.0},
            {"block_scale", "largest"},
            {"fit_last", 3}}},
          {"thresholds", {{"min_saturated_fraction", 0.95}, {"slope_margin", 0.1}}}};
}

ScenarioReport run_packing(const json& config, const RunOptions& opt) {
  const Common common = read_common(config, true);
  Fields p(config.at("params"), "params");
  const auto dims = p.integers("dims", 1, kMaxDim);
  CoveringParams c;
  c.scale = p.positive("scale");
  c.max_radius = p.positive("max_radius");
  const auto level = static_cast<int>(p.integer("level", 1, 24));
  c.n_max = static_cast<std::uint64_t>(p.integer("n_max", 1, 10000000));
  const auto n_start = static_cast<std::uint64_t>(p.integer("n_start", 1, 100000000));
  const std::string target = p.text("target", {"full", "fat_cantor"});
  c.block_first = static_cast<std::uint64_t>(p.integer("block_first", 1, 1000000));
  c.block_ratio = p.positive("block_ratio");
  c.block_scale = p.text("block_scale", {"smallest", "largest"}) == "largest" ? BlockScale::largest : BlockScale::smallest;
  c.fit_last = static_cast<std::size_t>(p.integer("fit_last", 0, 1000));
  p.finish();
  Fields th(config.at("thresholds"), "thresholds");
  const double min_frac = th.number("min_saturated_fraction");
  const double margin = th.number("slope_margin");
  th.finish();

  ScenarioReport rep;
  rep.seeds = common.seeds;
  Table rows{"saturation", {"dim", "trial", "seed", "target_cells", "reached", "ratio", "first_index", "union_slope"}, {}};
  rep.results["per_dim"] = json::array();
  for (auto d64 : dims) {
    const int d = static_cast<int>(d64);
    c.dim = d;
    c.level_cap = max_level(d);
    if (level > max_level(d)) throw ConfigError("params.level: exceeds the level cap for d=" + std::to_string(d));
    // Σ ℒ(A_n) diverges for r_n = c n^{-1/d}.
    const GeneratorSchedule s = ball_schedule(c, 1.0 / d);
    const DisplacementFamily disp = DisplacementFamily::translation(d);
    validate_schedule(s, disp);
    DyadicSet f;
    if (target == "full") {
      f = DyadicSet::full(d, level);
    } else {
      if (d != 1) throw ConfigError("params.target: fat_cantor needs dims = [1]");
      f = fat_cantor(smith_volterra_gaps(10), std::max(level, 12));
    }
    const BlockPlan plan = plan_for(s, c);
    std::vector<SaturationReport> sat(common.seeds.size());
    std::vector<double> slope(common.seeds.size());
    Stopwatch clock;
    parallel_for(common.seeds.size(), opt.jobs, [&](std::size_t i) {
      const auto centers = sample_centers(SamplingDistribution::uniform(d), std::max<std::uint64_t>(c.n_max, plan.boundaries.back()),
                                          common.seeds[i]);
      sat[i] = packing_saturation_check(centers, s, disp, f, level, n_start);
      const LimsupChain chain = truncated_limsup(centers, s, disp, plan);
      slope[i] = box_dimension_estimate(chain.stages, plan.levels, plan.boundaries, c.fit_last).value;
    });
    rep.log.push_back("packing d=" + std::to_string(d) + ": " + std::to_string(clock.seconds()) + " s");
    std::size_t saturated = 0;
    for (std::size_t i = 0; i < sat.size(); ++i) {
      saturated += sat[i].first_index > 0;
      rows.add({num(d), num(i), num(common.seeds[i]), num(sat[i].target), num(sat[i].reached), num(sat[i].ratio),
                num(sat[i].first_index), num(slope[i])});
    }
    const double frac = static_cast<double>(saturated) / static_cast<double>(sat.size());
    const double min_slope = *std::min_element(slope.begin(), slope.end());
    rep.results["per_dim"].push_back(
        {{"dim", d}, {"saturated_fraction", frac}, {"min_union_slope", min_slope}, {"median_union_slope", median(slope)}});
    add_check(rep, "saturation d=" + std::to_string(d), frac >= min_frac,
              num(saturated) + "/" + num(sat.size()) + " seeds saturate before n_max",
              {{"fraction", frac}, {"required", min_frac}});
    add_check(rep, "union slope d=" + std::to_string(d), min_slope >= d - margin,
              "smallest union slope " + num(min_slope) + " vs d - " + num(margin),
              {{"min_slope", min_slope}, {"required", d - margin}});
  }
  rep.tables = {std::move(rows)};
  return rep;
}

json fat_cantor_defaults() {
  json p = covering_defaults_json();
  p["alphas"] = {2.0};
  p["cantor_stages"] = 8;
  json deltas = json::array();
  for (int k = 3; k <= 12; ++k) deltas.push_back(std::ldexp(1.0, -k));
  // The density fraction only tends to 1 as δ → 0; the check starts at 2^-10.
  p["density"] = {{"level", 18},
                  {"deltas", deltas},
                  {"eps", 0.2},
                  {"samples", 2000},
                  {"inner_samples", 256},
                  {"max_delta", 0.0009765625}};
  return {{"scenario", "fat-cantor"},
          {"seeds", 20},
          {"master_seed", 20240603},
          {"params", p},
          {"thresholds", {{"tolerance", 0.15}}}};
}

ScenarioReport run_fat_cantor(const json& config, const RunOptions& opt) {
  const Common common = read_common(config, true);
  Fields p(config.at("params"), "params");
  CoveringParams c = read_covering(p, false);
  const auto alphas = p.numbers("alphas");
  const auto stages = static_cast<int>(p.integer("cantor_stages", 1, 20));
  Fields dp = p.object("density");
  const auto dlevel = static_cast<int>(dp.integer("level", 1, 24));
  const auto deltas = dp.numbers("deltas");
  const double eps = dp.number("eps");
  const auto samples = static_cast<std::size_t>(dp.integer("samples", 1, 10000000));
  const auto inner = static_cast<std::size_t>(dp.integer("inner_samples", 1, 100000));
  const double max_delta = dp.positive("max_delta");
  dp.finish();
  p.finish();
  Fields th(config.at("thresholds"), "thresholds");
  const double tol = th.positive("tolerance");
  th.finish();

  ScenarioReport rep;
  rep.seeds = common.seeds;
  const auto gaps = smith_volterra_gaps(stages);
  const DisplacementFamily disp = DisplacementFamily::translation(1);
  Table trials = trials_table();
  Table blocks = blocks_table();
  rep.results["per_alpha"] = json::array();
  for (double alpha : alphas) {
    GeneratorSchedule s;
    s.family = GeneratorSchedule::Family::fat_cantor_copy;
    s.dim = 1;
    s.scale = c.scale;
    s.exponent = alpha;
    s.max_radius = c.max_radius;
    s.n_max = c.n_max;
    s.cantor_gaps = gaps;
    validate_schedule(s, disp);
    const AlphaRun run = run_alpha(c, s, disp, common.seeds, opt);
    record_alpha(rep, trials, blocks, "fat_cantor", alpha, run, common.seeds);
    const double med = median(slopes(run));
    const double target = std::min(1.0, 1.0 / alpha);
    rep.results["per_alpha"].push_back({{"alpha", alpha}, {"target", target}, {"median", med}});
    add_check(rep, "median alpha=" + num(alpha), std::abs(med - target) <= tol,
              "median " + num(med) + " vs 1/alpha " + num(target), {{"median", med}, {"target", target}});
  }

  const DyadicSet f = fat_cantor(gaps, dlevel);
  const auto reports = density_interaction_ladder(f, disp, TorusPoint::of({0.0}), deltas, eps, samples, inner,
                                                  trial_seed(common.master_seed, 1u << 21));
  Table density{"density", {"delta", "fraction", "std_error", "meets", "vacuous"}, {}};
  bool all = true;
  for (std::size_t j = 0; j < reports.size(); ++j) {
    const auto& r = reports[j];
    density.add({num(deltas[j]), num(r.fraction), num(r.std_error), r.meets ? "1" : "0", r.vacuous ? "1" : "0"});
    if (deltas[j] <= max_delta) all = all && r.meets && !r.vacuous;
  }
  add_check(rep, "density interaction", all,
            "fraction >= 1 - eps within sampling error for every delta <= " + num(max_delta), {{"eps", eps}});
  rep.tables = {std::move(trials), std::move(blocks), std::move(density)};
  return rep;
}

json critical_defaults() {
  return {{"scenario", "critical-exponent"},
          {"params",
           {{"alphas", {1.5, 2.0, 3.0}},
            {"n_max", 100000},
            {"t_lo", 0.0},
            {"t_hi", 1.0},
            {"tol_t", 0.01},
            {"window", 6},
            {"threshold", 0.0},
            {"grid_points", 11}}},
          {"thresholds", {{"tolerance", 0.02}}}};
}

ScenarioReport run_critical(const json& config, const RunOptions&) {
  read_common(config, false);
  Fields p(config.at("params"), "params");
  const auto alphas = p.numbers("alphas");
  SeriesSchedule base;
  base.n_max = static_cast<std::uint64_t>(p.integer("n_max", 4, std::int64_t{1} << 40));
  base.t_lo = p.number("t_lo");
  base.t_hi = p.number("t_hi");
  CriticalOptions o;
  o.tol_t = p.positive("tol_t");
  o.window = static_cast<int>(p.integer("window", 2, 60));
  o.threshold = p.number("threshold");
  o.grid_points = static_cast<int>(p.integer("grid_points", 2, 1000));
  p.finish();
  Fields th(config.at("thresholds"), "thresholds");
  const double tol = th.positive("tolerance");
  th.finish();
  if (!(base.t_lo < base.t_hi)) throw ConfigError("params.t_hi: must exceed t_lo");

  ScenarioReport rep;
  Table table{"classifications", {"alpha", "t", "divergent", "slope"}, {}};
  rep.results["per_alpha"] = json::array();
  for (double alpha : alphas) {
    SeriesSchedule s = base;
    s.term = [alpha](std::uint64_t n, double t) { return std::pow(static_cast<double>(n), -alpha * t); };
    const CriticalResult r = critical_exponent(s, o);
    for (const auto& e : r.table) table.add({num(alpha), num(e.t), e.divergent ? "1" : "0", num(e.slope)});
    rep.results["per_alpha"].push_back({{"alpha", alpha},
                                        {"value", r.value},
                                        {"convention", r.convention},
                                        {"ambiguous", r.ambiguous},
                                        {"terms_monotone", r.terms_monotone}});
    add_check(rep, "critical alpha=" + num(alpha), std::abs(r.value - 1.0 / alpha) <= tol && !r.ambiguous,
              "estimate " + num(r.value) + " vs 1/alpha " + num(1.0 / alpha), {{"value", r.value}, {"tolerance", tol}});
  }
  rep.tables = {std::move(table)};
  return rep;
}

}  // namespace covlab::exp
