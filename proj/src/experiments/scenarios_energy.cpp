#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "common.hpp"
#include "covlab/content.hpp"
#include "covlab/gamma.hpp"
#include "covlab/sampling.hpp"
#include "covlab/shapes.hpp"

namespace covlab::exp {

namespace {

int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.next() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Coarse Bernoulli pattern refined to `level`, then thinned at the fine level,
// so the sets mix solid blocks with ragged edges. Never empty.
DyadicSet random_set(Rng& rng, int dim, int level) {
  const int coarse = uniform_int(rng, 1, level);
  const double p = 0.2 + 0.6 * rng.uniform();
  const std::uint64_t n = std::uint64_t{1} << (coarse * dim);
  std::vector<MortonCode> codes;
  for (std::uint64_t c = 0; c < n; ++c) {
    if (rng.uniform() < p) codes.push_back(c);
  }
  if (codes.empty()) codes.push_back(rng.next() % n);
  DyadicSet fine = DyadicSet::from_sorted_codes(dim, coarse, std::move(codes)).refined(level);
  std::vector<MortonCode> kept;
  for (MortonCode c : fine.codes()) {
    if (rng.uniform() >= 0.1) kept.push_back(c);
  }
  if (kept.empty()) kept.push_back(fine.codes().front());
  return DyadicSet::from_sorted_codes(dim, level, std::move(kept));
}

// Random subset keeping each cell with probability keep; never empty.
DyadicSet random_subset(Rng& rng, const DyadicSet& e, double keep) {
  std::vector<MortonCode> kept;
  for (MortonCode c : e.codes()) {
    if (rng.uniform() < keep) kept.push_back(c);
  }
  if (kept.empty()) kept.push_back(e.codes()[rng.next() % e.size()]);
  return DyadicSet::from_sorted_codes(e.dim(), e.level(), std::move(kept));
}

struct LevelRange {
  int lo;
  int hi;
};

LevelRange read_range(Fields p, int dim) {
  LevelRange r{static_cast<int>(p.integer("min", 1, max_level(dim))), static_cast<int>(p.integer("max", 1, max_level(dim)))};
  p.finish();
  if (r.lo > r.hi) throw ConfigError(p.path() + ".max: must be at least min");
  return r;
}

// Spread max/min of positive ratios; the best single constant then sits
// within a factor sqrt(spread) of every ratio.
double spread(const std::vector<double>& q) {
  const auto [lo, hi] = std::minmax_element(q.begin(), q.end());
  return *hi / *lo;
}

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

// Primal active-set solver for min wᵀKw over the simplex. Independent of the
// Frank-Wolfe solver: equality-constrained subproblems solved by LDLT, with a
// ratio test when the free solution leaves the orthant.
double simplex_qp(const Eigen::MatrixXd& k) {
  const Eigen::Index m = k.rows();
  Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  std::vector<bool> free(static_cast<std::size_t>(m), true);
  for (int it = 0; it < 50 * m + 100; ++it) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (free[static_cast<std::size_t>(i)]) idx.push_back(i);
    }
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd ks(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) ks(a, b) = k(idx[a], idx[b]);
    }
    const Eigen::VectorXd x = ks.ldlt().solve(Eigen::VectorXd::Ones(n));
    Eigen::VectorXd target = Eigen::VectorXd::Zero(m);
    for (Eigen::Index a = 0; a < n; ++a) target(idx[a]) = x(a) / x.sum();
    double step = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index i : idx) {
      if (target(i) < 0.0) {
        const double t = w(i) / (w(i) - target(i));
        if (t < step) {
          step = t;
          blocking = i;
        }
      }
    }
    w += step * (target - w);
    if (blocking >= 0) {
      w(blocking) = 0.0;
      free[static_cast<std::size_t>(blocking)] = false;
      continue;
    }
    // KKT: every fixed coordinate must have gradient at least the free level.
    const Eigen::VectorXd g = k * w;
    const double level = g(idx.front());
    Eigen::Index enter = -1;
    double worst = -1e-13 * std::abs(level);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!free[static_cast<std::size_t>(i)] && g(i) - level < worst) {
        worst = g(i) - level;
        enter = i;
      }
    }
    if (enter < 0) return w.dot(g);
    free[static_cast<std::size_t>(enter)] = true;
  }
  throw std::runtime_error("simplex QP oracle did not terminate");
}

Eigen::MatrixXd kernel_matrix(const DyadicSet& e, PairEnergyTable& table) {
  const auto cells = e.cells();
  const auto m = static_cast<Eigen::Index>(cells.size());
  const double vol2 = e.cell_volume() * e.cell_volume();
  Eigen::MatrixXd k(m, m);
  std::array<std::int64_t, kMaxDim> off{};
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      for (int i = 0; i < e.dim(); ++i) {
        off[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(cells[b][static_cast<std::size_t>(i)]) -
                                           static_cast<std::int64_t>(cells[a][static_cast<std::size_t>(i)]);
      }
      k(a, b) = table(std::span<const std::int64_t>(off.data(), static_cast<std::size_t>(e.dim()))) / vol2;
    }
  }
  return k;
}

}  // namespace

json ball_energy_defaults() {
  return {{"scenario", "ball-energy"},
          {"params",
           {{"dims", {1, 2}},
            {"s_fractions", {0.3, 0.6}},
            {"radius_exponents", {2, 3, 4, 5, 6}},
            {"levels", {{"1", 12}, {"2", 10}}},
            {"correction", "effective_radius"}}},
          {"thresholds", {{"max_spread", 0.03}, {"max_seconds", 60.0}}}};
}

ScenarioReport run_ball_energy(const json& config, const RunOptions&) {
  read_common(config, false);
  Fields p(config.at("params"), "params");
  const auto dims = p.integers("dims", 1, kMaxDim);
  const auto fractions = p.numbers("s_fractions");
  const auto exps = p.integers("radius_exponents", 1, 20);
  Fields lv = p.object("levels");
  std::map<int, int> levels;
  for (auto d : dims) levels[static_cast<int>(d)] = static_cast<int>(lv.integer(std::to_string(d), 1, max_level(static_cast<int>(d))));
  lv.finish();
  const bool corrected = p.text("correction", {"none", "effective_radius"}) == "effective_radius";
  p.finish();
  Fields th(config.at("thresholds"), "thresholds");
  const double max_spread = th.positive("max_spread");
  const double max_seconds = th.positive("max_seconds");
  th.finish();

  ScenarioReport rep;
  Stopwatch clock;
  Table table{"ball_energy", {"dim", "s", "radius", "level", "measure", "energy", "raw_ratio", "corrected_ratio"}, {}};
  rep.results["series"] = json::array();
  for (auto d64 : dims) {
    const int d = static_cast<int>(d64);
    const int level = levels.at(d);
    for (double f : fractions) {
      if (!(f > 0.0 && f < 1.0)) throw ConfigError("params.s_fractions: entries must lie in (0, 1)");
      const double s = f * d;
      PairEnergyTable pair(d, level, GaugeFunction::power(s));
      std::vector<double> ratios;
      for (auto k : exps) {
        const double r = std::ldexp(1.0, -static_cast<int>(k));
        if (r >= 0.5) throw ConfigError("params.radius_exponents: radius must stay below 1/2");
        const std::vector<double> c(static_cast<std::size_t>(d), 0.5);
        const DyadicSet ball = rasterize_ball(TorusPoint(d, c), r, level, RasterMode::inner);
        if (ball.empty()) throw ConfigError("params.levels: ball of radius " + num(r) + " has no inner cells");
        const double l = measure(ball);
        const double energy = set_energy(ball, pair);
        // The inner raster is a ball of radius r_eff in measure, not r.
        const double r_eff = std::pow(l / unit_ball_volume(d), 1.0 / d);
        const double raw = energy * std::pow(r, s) / (l * l);
        const double fixed = energy * std::pow(r_eff, s) / (l * l);
        ratios.push_back(corrected ? fixed : raw);
        table.add({num(d), num(s), num(r), num(level), num(l), num(energy), num(raw), num(fixed)});
      }
      const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
      const double rel = (*hi - *lo) / *lo;
      rep.results["series"].push_back({{"dim", d}, {"s", s}, {"relative_spread", rel}});
      add_check(rep, "ball law d=" + std::to_string(d) + " s=" + num(s), rel <= max_spread,
                "relative spread " + num(rel) + " across radii (limit " + num(max_spread) + ")",
                {{"relative_spread", rel}, {"limit", max_spread}});
    }
  }
  const double seconds = clock.seconds();
  rep.log.push_back("ball-energy: " + std::to_string(seconds) + " s");
  add_check(rep, "runtime", seconds <= max_seconds, "wall time within " + num(max_seconds) + " s (see run.log)",
            {{"limit_seconds", max_seconds}});
  rep.tables = {std::move(table)};
  return rep;
}

json rectangles_defaults() {
  return {{"scenario", "rectangles"},
          {"params", {{"level", 10}, {"long_exponents", {2, 3, 4, 5, 6}}, {"aspect_exponents", {0, 1, 2, 3, 4}},
                      {"s_small", 0.5}, {"s_large", 1.5}}},
          {"thresholds", {{"max_factor", 4.0}}}};
}

ScenarioReport run_rectangles(const json& config, const RunOptions& opt) {
  read_common(config, false);
  Fields p(config.at("params"), "params");
  const int level = static_cast<int>(p.integer("level", 1, max_level(2)));
  const auto longs = p.integers("long_exponents", 1, 20);
  const auto aspects = p.integers("aspect_exponents", 0, 20);
  const double s_small = p.positive("s_small");
  const double s_large = p.positive("s_large");
  p.finish();
  Fields th(config.at("thresholds"), "thresholds");
  const double max_factor = th.positive("max_factor");
  th.finish();
  if (!(s_small < 1.0) || !(s_large > 1.0 && s_large < 2.0)) {
    throw ConfigError("params: need s_small < 1 < s_large < 2");
  }

  struct Case {
    double a, b, s, ref;
    GLower g;
  };
  std::vector<Case> cases;
  for (double s : {s_small, s_large}) {
    for (auto ka : longs) {
      for (auto kb : aspects) {
        const double a = std::ldexp(1.0, -static_cast<int>(ka));
        const double b = std::ldexp(a, -static_cast<int>(kb));
        if (b < std::ldexp(1.0, -level)) throw ConfigError("params: side " + num(b) + " is below one cell at the level");
        // b ≤ a: G is comparable to a^s when s < 1 and to a b^{s-1} when s > 1.
        cases.push_back({a, b, s, s < 1.0 ? std::pow(a, s) : a * std::pow(b, s - 1.0), {}});
      }
    }
  }
  parallel_for(cases.size(), opt.jobs, [&](std::size_t i) {
    Case& c = cases[i];
    const std::vector<double> sides{c.a, c.b};
    const DyadicSet rect = rasterize_rectangle(TorusPoint::of({0.25, 0.25}), sides, level, RasterMode::inner);
    c.g = g_lower(rect, GaugeFunction::power(c.s));
  });

  ScenarioReport rep;
  Table table{"rectangles", {"s", "a", "b", "g_lower", "reference", "ratio", "witness"}, {}};
  for (double s : {s_small, s_large}) {
    std::vector<double> q;
    for (const Case& c : cases) {
      if (c.s != s) continue;
      q.push_back(c.g.value / c.ref);
      table.add({num(s), num(c.a), num(c.b), num(c.g.value), num(c.ref), num(q.back()), c.g.witness_kind});
    }
    const double sp = spread(q);
    rep.results["s=" + num(s)] = {{"spread", sp}, {"cases", q.size()}};
    add_check(rep, "rectangle comparability s=" + num(s), sp <= max_factor,
              "max/min of G_lower/reference over " + num(q.size()) + " rectangles is " + num(sp),
              {{"spread", sp}, {"limit", max_factor}});
  }
  rep.tables = {std::move(table)};
  return rep;
}

json two_cubes_defaults() {
  return {{"scenario", "two-cubes"},
          {"params",
           {{"dim", 2},
            {"t", 1.0},
            {"r2", 0.5},
            {"max_ratio", 8},
            {"rho_factor", 2.0},
            {"extra_subdivisions", 2},
            {"min_level", 11},
            {"cells_per_hole", 2}}},
          {"thresholds", {{"max_linear_spread", 2.0}}}};
}

ScenarioReport run_two_cubes(const json& config, const RunOptions& opt) {
  read_common(config, false);
  Fields p(config.at("params"), "params");
  const int d = static_cast<int>(p.integer("dim", 1, kMaxDim));
  const double t = p.positive("t");
  const double r2 = p.positive("r2");
  const auto max_ratio = p.integer("max_ratio", 2, 1 << 20);
  const double rho_factor = p.positive("rho_factor");
  const int extra = static_cast<int>(p.integer("extra_subdivisions", 0, 20));
  const int min_level = static_cast<int>(p.integer("min_level", 1, 24));
  const double cells_per_hole = p.positive("cells_per_hole");
  p.finish();
  Fields th(config.at("thresholds"), "thresholds");
  const double max_linear_spread = th.positive("max_linear_spread");
  th.finish();
  if (!(t < d)) throw ConfigError("params.t: must be below dim");
  if (!(r2 <= 0.5)) throw ConfigError("params.r2: the two cubes must fit side by side");

  std::vector<int> ratios;
  for (std::int64_t q = 2; q <= max_ratio; q *= 2) ratios.push_back(static_cast<int>(q));
  if (ratios.size() < 2) throw ConfigError("params.max_ratio: need at least two ratios");

  struct Row {
    int q = 0;
    int level = 0;
    double g = 0.0;
    GLower big;
  };
  std::vector<Row> rows(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const int q = ratios[i];
    const int sub = static_cast<int>(std::lround(std::log2(q))) + extra;
    const double rho = 1.0 / (rho_factor * q);
    // Each shrunk subcube must still span cells_per_hole cells per side.
    const double hole = r2 * std::ldexp(1.0, -sub) * rho;
    const int need = static_cast<int>(std::ceil(std::log2(cells_per_hole / hole) - 1e-12));
    rows[i].q = q;
    rows[i].level = std::max(min_level, need);
    if (rows[i].level > max_level(d)) {
      throw ResourceLimitError("two-cubes: ratio " + std::to_string(q) + " needs level " + std::to_string(rows[i].level) +
                               " above the cap " + std::to_string(max_level(d)) + " for d=" + std::to_string(d));
    }
  }
  parallel_for(rows.size(), opt.jobs, [&](std::size_t i) {
    TwoCubesSpec spec;
    spec.dim = d;
    spec.r2 = r2;
    spec.r1 = r2 / rows[i].q;
    spec.rho = 1.0 / (rho_factor * rows[i].q);
    spec.subdivisions = static_cast<int>(std::lround(std::log2(rows[i].q))) + extra;
    spec.level = rows[i].level;
    const TwoCubesSet a = example_two_cubes(spec);
    const GaugeFunction h = GaugeFunction::power(t);
    rows[i].g = g_value(a.set, h);
    rows[i].big = g_lower(a.set, h);
  });

  ScenarioReport rep;
  Table table{"two_cubes", {"ratio", "level", "g", "g_lower", "quotient", "quotient_over_ratio", "witness"}, {}};
  std::vector<double> quotient, per_ratio;
  bool monotone = true;
  for (const Row& r : rows) {
    quotient.push_back(r.big.value / r.g);
    per_ratio.push_back(quotient.back() / r.q);
    if (quotient.size() > 1 && !(quotient.back() > quotient[quotient.size() - 2])) monotone = false;
    table.add({num(r.q), num(r.level), num(r.g), num(r.big.value), num(quotient.back()), num(per_ratio.back()), r.big.witness_kind});
  }
  const double sp = spread(per_ratio);
  rep.results["quotients"] = quotient;
  rep.results["linear_spread"] = sp;
  add_check(rep, "monotone in ratio", monotone, "G_lower/g strictly increases along the ratio ladder");
  add_check(rep, "at least linear", sp <= max_linear_spread,
            "(G_lower/g)/ratio stays within a factor " + num(sp) + " (limit " + num(max_linear_spread) + ")",
            {{"spread", sp}, {"limit", max_linear_spread}});
  rep.tables = {std::move(table)};
  return rep;
}

json gauge_ball_defaults() {
  return {{"scenario", "gauge-ball"},
          {"params", {{"dim", 1}, {"log_exponent", 2.0}, {"radius_exponents", {3, 4, 5, 6, 7}}, {"level", 14}}},
          {"thresholds", {{"max_factor", 4.0}}}};
}

ScenarioReport run_gauge_ball(const json& config, const RunOptions& opt) {
  read_common(config, false);
  Fields p(config.at("params"), "params");
  const int d = static_cast<int>(p.integer("dim", 1, kMaxDim));
  const double q = p.positive("log_exponent");
  const auto exps = p.integers("radius_exponents", 1, 20);
  const int level = static_cast<int>(p.integer("level", 1, max_level(d)));
  p.finish();
  Fields th(config.at("thresholds"), "thresholds");
  const double max_factor = th.positive("max_factor");
  th.finish();

  const GaugeFunction h = GaugeFunction::power_log(d, q);
  std::vector<GLower> g(exps.size());
  std::vector<double> radii;
  for (auto k : exps) {
    radii.push_back(std::ldexp(1.0, -static_cast<int>(k)));
    if (radii.back() > h.cutoff()) throw ConfigError("params.radius_exponents: radius above the gauge cutoff " + num(h.cutoff()));
  }
  parallel_for(radii.size(), opt.jobs, [&](std::size_t i) {
    const std::vector<double> c(static_cast<std::size_t>(d), 0.5);
    g[i] = g_lower(rasterize_ball(TorusPoint(d, c), radii[i], level, RasterMode::inner), h);
  });

  ScenarioReport rep;
  Table table{"gauge_ball", {"radius", "g_lower", "reference", "ratio", "witness"}, {}};
  std::vector<double> ratios;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double ref = h(radii[i]) / std::abs(std::log(radii[i]));
    ratios.push_back(g[i].value / ref);
    table.add({num(radii[i]), num(g[i].value), num(ref), num(ratios.back()), g[i].witness_kind});
  }
  const double sp = spread(ratios);
  rep.results["spread"] = sp;
  add_check(rep, "gauge ball comparability", sp <= max_factor,
            "max/min of G_lower/(h(r)/|log r|) is " + num(sp), {{"spread", sp}, {"limit", max_factor}});
  rep.tables = {std::move(table)};
  return rep;
}

json content_suite_defaults() {
  return {{"scenario", "content-suite"},
          {"seeds", 200},
          {"master_seed", 20240604},
          {"params",
           {{"dims", {1, 2}},
            {"levels", {{"1", {{"min", 3}, {"max", 10}}}, {"2", {{"min", 2}, {"max", 6}}}}},
            {"t_fractions", {0.3, 0.7}}}},
          {"thresholds", {{"max_violations", 0}}}};
}

ScenarioReport run_content_suite(const json& config, const RunOptions& opt) {
  const Common common = read_common(config, true);
  Fields p(config.at("params"), "params");
  const auto dims = p.integers("dims", 1, kMaxDim);
  Fields lv = p.object("levels");
  std::map<int, LevelRange> ranges;
  for (auto d : dims) ranges.emplace(static_cast<int>(d), read_range(lv.object(std::to_string(d)), static_cast<int>(d)));
  lv.finish();
  const auto fractions = p.numbers("t_fractions");
  p.finish();
  Fields th(config.at("thresholds"), "thresholds");
  const auto max_violations = static_cast<std::size_t>(th.integer("max_violations", 0, 1000000));
  th.finish();
  for (double f : fractions) {
    if (!(f > 0.0 && f < 1.0)) throw ConfigError("params.t_fractions: entries must lie in (0, 1)");
  }

  struct Row {
    int dim, level;
    std::size_t cells;
    std::vector<double> h, g;
    std::vector<std::string> witness;
  };
  std::vector<Row> rows(common.seeds.size());
  parallel_for(rows.size(), opt.jobs, [&](std::size_t i) {
    Rng rng(common.seeds[i]);
    const int d = static_cast<int>(dims[i % dims.size()]);
    const LevelRange r = ranges.at(d);
    const DyadicSet f = random_set(rng, d, uniform_int(rng, r.lo, r.hi));
    Row row{d, f.level(), f.size(), {}, {}, {}};
    for (double frac : fractions) {
      const GaugeFunction h = GaugeFunction::power(frac * d);
      row.h.push_back(hausdorff_content_upper(f, h));
      const GLower g = g_lower(f, h);
      row.g.push_back(g.value);
      row.witness.push_back(g.witness_kind);
    }
    rows[i] = std::move(row);
  });

  ScenarioReport rep;
  rep.seeds = common.seeds;
  Table table{"content", {"set", "seed", "dim", "level", "cells", "t", "content_upper", "scaled_content", "g_lower", "margin", "witness"}, {}};
  std::size_t violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    for (std::size_t j = 0; j < fractions.size(); ++j) {
      const double t = fractions[j] * r.dim;
      const double scaled = r.h[j] * std::pow(r.dim, t / 2.0);
      const double margin = scaled / r.g[j];
      worst = std::min(worst, margin);
      violations += scaled < r.g[j];
      table.add({num(i), num(common.seeds[i]), num(r.dim), num(r.level), num(r.cells), num(t), num(r.h[j]), num(scaled),
                 num(r.g[j]), num(margin), r.witness[j]});
    }
  }
  rep.results["violations"] = violations;
  rep.results["smallest_margin"] = worst;
  add_check(rep, "content dominates G_lower", violations <= max_violations,
            num(violations) + " violations over " + num(rows.size() * fractions.size()) + " cases; smallest margin " + num(worst),
            {{"violations", violations}, {"smallest_margin", worst}});
  rep.tables = {std::move(table)};
  return rep;
}

json leb_split_defaults() {
  return {{"scenario", "leb-split"},
          {"seeds", 50},
          {"master_seed", 20240605},
          {"params",
           {{"dims", {1, 2}},
            {"levels", {{"1", {{"min", 3}, {"max", 10}}}, {"2", {{"min", 2}, {"max", 6}}}}},
            {"fractions", {0.5, 0.25}},
            {"s_fraction", 0.5},
            {"max_extra_levels", 6}}},
          {"thresholds", {{"energy_slack", 1.05}}}};
}

ScenarioReport run_leb_split(const json& config, const RunOptions& opt) {
  const Common common = read_common(config, true);
  Fields p(config.at("params"), "params");
  const auto dims = p.integers("dims", 1, kMaxDim);
  Fields lv = p.object("levels");
  std::map<int, LevelRange> ranges;
  for (auto d : dims) ranges.emplace(static_cast<int>(d), read_range(lv.object(std::to_string(d)), static_cast<int>(d)));
  lv.finish();
  const auto fractions = p.numbers("fractions");
  const double s_fraction = p.positive("s_fraction");
  const int extra = static_cast<int>(p.integer("max_extra_levels", 0, 24));
  p.finish();
  Fields th(config.at("thresholds"), "thresholds");
  const double slack = th.positive("energy_slack");
  th.finish();
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("params.fractions: entries must lie in (0, 1]");
  }

  struct Case {
    int dim = 0;
    int level = 0;
    double p = 0.0, s = 0.0, measure_in = 0.0, measure_out = 0.0, cell = 0.0, energy_in = 0.0, energy_out = 0.0;
    int out_level = 0, grid_level = 0;
  };
  const std::size_t nf = fractions.size();
  std::vector<Case> cases(common.seeds.size() * nf);
  parallel_for(common.seeds.size(), opt.jobs, [&](std::size_t i) {
    Rng rng(common.seeds[i]);
    const int d = static_cast<int>(dims[i % dims.size()]);
    const LevelRange r = ranges.at(d);
    const DyadicSet f = random_set(rng, d, uniform_int(rng, r.lo, r.hi));
    const double s = s_fraction * d;
    const double energy = set_energy(f, GaugeFunction::power(s));
    for (std::size_t j = 0; j < nf; ++j) {
      const LebSplit split = lem_leb_split(f, fractions[j], s, kDefaultEnergyTol, extra);
      Case& c = cases[i * nf + j];
      c.dim = d;
      c.level = f.level();
      c.p = fractions[j];
      c.s = s;
      c.measure_in = measure(f);
      c.measure_out = measure(split.set);
      c.cell = split.set.cell_volume();
      c.energy_in = energy;
      c.energy_out = set_energy(split.set, GaugeFunction::power(s));
      c.out_level = split.set.level();
      c.grid_level = split.grid_level;
    }
  });

  ScenarioReport rep;
  rep.seeds = common.seeds;
  Table table{"leb_split", {"set", "seed", "dim", "level", "p", "s", "measure", "split_measure", "cell_volume",
                            "energy", "split_energy", "energy_ratio", "output_level", "grid_level"}, {}};
  std::size_t measure_fail = 0, energy_fail = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const Case& c = cases[k];
    const double ratio = c.energy_out / (2.0 * c.p * c.p * c.energy_in);
    worst = std::max(worst, ratio);
    measure_fail += std::abs(c.measure_out - c.p * c.measure_in) > c.cell * (1.0 + 1e-12);
    energy_fail += ratio > slack;
    table.add({num(k / nf), num(common.seeds[k / nf]), num(c.dim), num(c.level), num(c.p), num(c.s), num(c.measure_in),
               num(c.measure_out), num(c.cell), num(c.energy_in), num(c.energy_out), num(ratio), num(c.out_level),
               num(c.grid_level)});
  }
  rep.results["largest_energy_ratio"] = worst;
  add_check(rep, "split measure", measure_fail == 0,
            num(measure_fail) + " of " + num(cases.size()) + " splits miss p L(F) by more than one cell volume",
            {{"failures", measure_fail}});
  add_check(rep, "split energy", energy_fail == 0,
            num(energy_fail) + " of " + num(cases.size()) + " splits exceed 2p^2 I(F) x " + num(slack) +
                "; largest I(F1)/(2p^2 I(F)) = " + num(worst),
            {{"failures", energy_fail}, {"largest_ratio", worst}, {"slack", slack}});
  rep.tables = {std::move(table)};
  return rep;
}

json gamma_suite_defaults() {
  return {{"scenario", "gamma-suite"},
          {"seeds", 50},
          {"master_seed", 20240606},
          {"params",
           {{"dims", {1, 2}},
            {"levels", {{"1", {{"min", 3}, {"max", 6}}}, {"2", {{"min", 2}, {"max", 4}}}}},
            {"s_fraction", 0.5},
            {"oracle_sets", 10},
            {"keep_fraction", 0.6},
            {"rel_gap", 1e-6},
            {"max_iters", 200000}}},
          {"thresholds", {{"oracle_slack", 1e-9}}}};
}

ScenarioReport run_gamma_suite(const json& config, const RunOptions& opt) {
  const Common common = read_common(config, true);
  Fields p(config.at("params"), "params");
  const auto dims = p.integers("dims", 1, kMaxDim);
  Fields lv = p.object("levels");
  std::map<int, LevelRange> ranges;
  for (auto d : dims) ranges.emplace(static_cast<int>(d), read_range(lv.object(std::to_string(d)), static_cast<int>(d)));
  lv.finish();
  const double s_fraction = p.positive("s_fraction");
  const auto oracle_sets = static_cast<std::size_t>(p.integer("oracle_sets", 0, 100000));
  const double keep = p.positive("keep_fraction");
  GammaOptions go;
  go.rel_gap = p.positive("rel_gap");
  go.max_iters = static_cast<int>(p.integer("max_iters", 1, 100000000));
  p.finish();
  Fields th(config.at("thresholds"), "thresholds");
  const double slack = th.number("oracle_slack");
  th.finish();
  if (!(s_fraction < 1.0)) throw ConfigError("params.s_fraction: must lie in (0, 1)");
  if (!(keep < 1.0)) throw ConfigError("params.keep_fraction: must lie in (0, 1)");

  struct Case {
    int dim = 0, level = 0;
    double s = 0.0;
    std::size_t big_cells = 0, small_cells = 0;
    GammaResult big, small;
    double qp = std::nan("");
    double content_bound = 0.0, content_upper = 0.0;
  };
  std::vector<Case> cases(common.seeds.size());
  parallel_for(cases.size(), opt.jobs, [&](std::size_t i) {
    Rng rng(common.seeds[i]);
    Case& c = cases[i];
    c.dim = static_cast<int>(dims[i % dims.size()]);
    const LevelRange r = ranges.at(c.dim);
    const DyadicSet e = random_set(rng, c.dim, uniform_int(rng, r.lo, r.hi));
    const DyadicSet f = random_subset(rng, e, keep);
    c.level = e.level();
    c.s = s_fraction * c.dim;
    c.big_cells = e.size();
    c.small_cells = f.size();
    PairEnergyTable table(c.dim, e.level(), GaugeFunction::power(c.s));
    c.big = gamma(e, table, go);
    c.small = gamma(f, table, go);
    if (i < oracle_sets) c.qp = simplex_qp(kernel_matrix(e, table));
    const std::vector<DyadicSet> chain{e, f};
    c.content_bound = content_lower_from_gamma(chain, c.s, go).value;
    c.content_upper = hausdorff_content_upper(f, GaugeFunction::power(c.s)) * std::pow(c.dim, c.s / 2.0);
  });

  ScenarioReport rep;
  rep.seeds = common.seeds;
  Table table{"gamma", {"pair", "seed", "dim", "level", "s", "cells", "subset_cells", "gamma", "gap", "subset_gamma",
                        "subset_gap", "qp_oracle", "content_bound", "scaled_content_upper"}, {}};
  std::size_t oracle_fail = 0, mono_fail = 0, pos_fail = 0, content_fail = 0, unconverged = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Case& c = cases[i];
    table.add({num(i), num(common.seeds[i]), num(c.dim), num(c.level), num(c.s), num(c.big_cells), num(c.small_cells),
               num(c.big.value), num(c.big.duality_gap), num(c.small.value), num(c.small.duality_gap), num(c.qp),
               num(c.content_bound), num(c.content_upper)});
    unconverged += !c.big.converged + !c.small.converged;
    if (!std::isnan(c.qp)) {
      const double diff = c.big.value - c.qp;
      oracle_fail += diff < -slack * c.qp || diff > c.big.duality_gap + slack * c.qp;
    }
    // Γ(E) ≤ Γ(F) for F ⊆ E; the computed Γ(E) may sit up to its gap above.
    mono_fail += c.big.value - c.big.duality_gap > c.small.value;
    for (const GammaResult* g : {&c.big, &c.small}) pos_fail += !(g->value > 0.0 && std::isfinite(g->value));
    content_fail += c.content_bound > c.content_upper;
  }
  const std::size_t n_oracle = std::min(oracle_sets, cases.size());
  add_check(rep, "qp oracle", oracle_fail == 0 && n_oracle > 0,
            num(oracle_fail) + " of " + num(n_oracle) + " sets outside [QP, QP + gap]", {{"failures", oracle_fail}});
  add_check(rep, "monotone", mono_fail == 0, num(mono_fail) + " of " + num(cases.size()) + " nested pairs violate monotonicity",
            {{"failures", mono_fail}});
  add_check(rep, "positive and finite", pos_fail == 0, num(pos_fail) + " non-positive or infinite values",
            {{"failures", pos_fail}});
  add_check(rep, "content bound", content_fail == 0,
            num(content_fail) + " of " + num(cases.size()) + " chains exceed the scaled content upper bound",
            {{"failures", content_fail}});
  add_check(rep, "converged", unconverged == 0, num(unconverged) + " solves stopped at the iteration cap",
            {{"unconverged", unconverged}});
  rep.tables = {std::move(table)};
  return rep;
}

}  // namespace covlab::exp
