#include <cmath>
#include <random>

#include "covlab/content.hpp"
#include "covlab/gamma.hpp"
#include "doctest.h"

using namespace covlab;

TEST_CASE("gamma of the full torus is the uniform energy") {
  const DyadicSet f = DyadicSet::full(1, 5);
  const GammaResult g = gamma(f, 0.5);
  CHECK(g.value == doctest::Approx(measure_energy(DiscreteMeasure::uniform(f), GaugeFunction::power(0.5))).epsilon(1e-9));
  CHECK(g.converged);
}

TEST_CASE("symmetric sets have the uniform minimizer") {
  // Two cells: by symmetry the optimum splits the mass evenly.
  const DyadicSet two = DyadicSet::from_codes(2, 3, {0, 9});
  PairEnergyTable t(2, 3, GaugeFunction::power(1.0));
  const GammaResult g = gamma(two, t);
  CHECK(g.value == doctest::Approx(measure_energy(DiscreteMeasure::uniform(two), t)).epsilon(1e-6));
  CHECK(g.minimizer.weights[0] == doctest::Approx(0.5).epsilon(1e-4));
  // One cell: the only probability density.
  const DyadicSet one = DyadicSet::from_codes(2, 3, {5});
  const double vol = one.cell_volume();
  const std::vector<std::int64_t> zero{0, 0};
  CHECK(gamma(one, t).value == doctest::Approx(t(zero) / (vol * vol)).epsilon(1e-12));
}

TEST_CASE("gamma is below the uniform energy, antitone, positive and certified") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<MortonCode> codes;
    for (MortonCode c = 0; c < 64; ++c) {
      if (rng() % 2) codes.push_back(c);
    }
    if (codes.size() < 2) continue;
    const DyadicSet e = DyadicSet::from_sorted_codes(1, 6, codes);
    codes.resize(codes.size() / 2);
    const DyadicSet f = DyadicSet::from_sorted_codes(1, 6, codes);
    PairEnergyTable t(1, 6, GaugeFunction::power(0.5));
    const GammaResult ge = gamma(e, t), gf = gamma(f, t);
    CHECK(ge.value <= measure_energy(DiscreteMeasure::uniform(e), t) * (1 + 1e-12));
    CHECK(ge.value - ge.duality_gap <= gf.value);
    CHECK(ge.value > 0.0);
    CHECK(std::isfinite(ge.value));
    CHECK(ge.duality_gap >= 0.0);
    CHECK(ge.minimizer.total_mass() == doctest::Approx(1.0));
    const std::vector<DyadicSet> chain{e, f};
    const auto bound = content_lower_from_gamma(chain, 0.5);
    CHECK(bound.value == doctest::Approx(1.0 / std::max(ge.value, gf.value)));
    CHECK(bound.value <= hausdorff_content_upper(f, GaugeFunction::power(0.5)));
    CHECK(gamma_stability(e, f, 0.5) == doctest::Approx(gf.value - ge.value).epsilon(1e-6));
  }
}

TEST_CASE("gamma edge cases") {
  CHECK(std::isinf(gamma(DyadicSet(1, 4), 0.5).value));
  CHECK_THROWS(gamma(DyadicSet::full(1, 4), 1.0));
  GammaOptions small;
  small.max_cells = 8;
  CHECK_THROWS_AS(gamma(DyadicSet::full(1, 4), 0.5, small), ResourceLimitError);
  const std::vector<DyadicSet> not_nested{DyadicSet::from_codes(1, 3, {1}), DyadicSet::from_codes(1, 3, {1, 2})};
  CHECK_FALSE(content_lower_from_gamma(not_nested, 0.5).nested);
}
