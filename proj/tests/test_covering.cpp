#include <cmath>
#include <numbers>
#include <random>

#include "covlab/covering.hpp"
#include "covlab/shapes.hpp"
#include "doctest.h"

using namespace covlab;

TEST_CASE("a single translated ball is its outer raster") {
  const GeneratorSchedule s = GeneratorSchedule::balls(2, 0.1, 1.0, 10);
  const auto centers = sample_centers(SamplingDistribution::uniform(2), 1, 3);
  const DyadicSet u = stage_union(centers, s, DisplacementFamily::translation(2), 0, 1, 7);
  CHECK(u == rasterize_ball(centers[0], s.radius(1), 7, RasterMode::outer));
}

TEST_CASE("stage unions contain every sampled generator point") {
  for (const DisplacementFamily& disp : {DisplacementFamily::translation(2), DisplacementFamily::nonlinear(2, 0.02, 1)}) {
    GeneratorSchedule s = GeneratorSchedule::balls(2, 0.1, 0.5, 50);
    const auto centers = sample_centers(SamplingDistribution::uniform(2), 50, 8);
    const int level = 8;
    const DyadicSet u = stage_union(centers, s, disp, 10, 50, level);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), rad(0, 1);
    for (std::uint64_t n = 11; n <= 50; ++n) {
      for (int k = 0; k < 30; ++k) {
        const double r = s.radius(n) * std::sqrt(rad(rng)) * 0.999, a = ang(rng);
        const TorusPoint z = disp.apply(centers[n - 1], {r * std::cos(a), r * std::sin(a), 0});
        CellIndex idx{};
        for (int i = 0; i < 2; ++i) idx[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(z[i] * (1 << level));
        CHECK(u.contains_code(encode_cell(2, idx)));
      }
    }
  }
}

TEST_CASE("block plans are geometric, bounded and level-monotone") {
  const GeneratorSchedule s = GeneratorSchedule::balls(1, 1.0, 2.0, 100000);
  for (BlockScale rule : {BlockScale::smallest, BlockScale::largest}) {
    const BlockPlan p = make_block_plan(s, 1, 4.0, 18, rule);
    CHECK(p.boundaries.front() == 0);
    CHECK(p.boundaries.back() <= 100000);
    for (std::size_t j = 1; j < p.boundaries.size(); ++j) CHECK(p.boundaries[j] > p.boundaries[j - 1]);
    for (std::size_t j = 1; j < p.levels.size(); ++j) CHECK(p.levels[j] >= p.levels[j - 1]);
    const BlockPlan u = uncapped_prefix(p);
    for (bool c : u.capped) CHECK_FALSE(c);
  }
}

TEST_CASE("box dimension of reference chains") {
  // Full sets at growing levels: slope d. One cell refined: slope 0.
  for (int d = 1; d <= 2; ++d) {
    std::vector<DyadicSet> sets;
    std::vector<int> levels;
    for (int l = 2; l <= 7; ++l) {
      sets.push_back(DyadicSet::full(d, l));
      levels.push_back(l);
    }
    CHECK(box_dimension_estimate(sets, levels).value == doctest::Approx(d));
    std::vector<DyadicSet> cells;
    for (int l : levels) cells.push_back(DyadicSet::from_codes(d, l, {0}));
    CHECK(box_dimension_estimate(cells, levels).value == doctest::Approx(0.0));
  }
  std::vector<DyadicSet> two{DyadicSet::full(1, 2), DyadicSet::full(1, 3)};
  std::vector<int> lv{2, 3};
  CHECK_THROWS(box_dimension_estimate(two, lv));
}

TEST_CASE("limsup chain is nested with monotone survival") {
  const GeneratorSchedule s = GeneratorSchedule::balls(1, 0.5, 0.7, 20000);
  const BlockPlan plan = uncapped_prefix(make_block_plan(s, 1, 4.0, 18));
  const auto centers = sample_centers(SamplingDistribution::uniform(1), plan.boundaries.back(), 2);
  const LimsupChain c = truncated_limsup(centers, s, DisplacementFamily::translation(1), plan);
  REQUIRE(c.chain.size() == plan.blocks());
  for (std::size_t j = 1; j < c.chain.size(); ++j) {
    CHECK(is_subset(c.chain[j], c.chain[j - 1]));
    CHECK(c.survival[j] <= c.survival[j - 1]);
  }
}

TEST_CASE("divergent schedules saturate and generator measures are exact") {
  GeneratorSchedule s = GeneratorSchedule::balls(2, 0.5, 0.5, 10000);
  const auto centers = sample_centers(SamplingDistribution::uniform(2), 10000, 5);
  const SaturationReport r = packing_saturation_check(centers, s, DisplacementFamily::translation(2), DyadicSet::full(2, 4), 4, 1);
  CHECK(r.target == 256);
  CHECK(r.ratio == 1.0);
  CHECK(r.first_index > 0);
  CHECK(s.measure(4) == doctest::Approx(std::numbers::pi * s.radius(4) * s.radius(4)));
  CHECK(s.radius(1) == doctest::Approx(0.15));  // capped at max_radius
}

TEST_CASE("density interaction is exact on full targets") {
  const DyadicSet f = DyadicSet::full(1, 10);
  const std::vector<double> deltas{0.1, 0.01};
  const auto reports = density_interaction_ladder(f, DisplacementFamily::translation(1), TorusPoint::of({0.0}), deltas, 0.2, 200, 32, 1);
  for (const auto& r : reports) {
    CHECK(r.fraction == 1.0);
    CHECK(r.meets);
  }
}

TEST_CASE("schedule validation") {
  GeneratorSchedule s = GeneratorSchedule::balls(1, 1.0, 1.0, 100);
  s.max_radius = 0.4;
  CHECK_THROWS(s.validate(DisplacementFamily::nonlinear(1, 0.07, 1)));
  CHECK_NOTHROW(s.validate(DisplacementFamily::translation(1)));
  s.scale = -1;
  CHECK_THROWS(s.validate(DisplacementFamily::translation(1)));
}
