#include <cmath>
#include <random>

#include "covlab/content.hpp"
#include "covlab/shapes.hpp"
#include "doctest.h"

using namespace covlab;

namespace {

DyadicSet random_set(std::mt19937_64& rng, int dim, int level, double p) {
  std::bernoulli_distribution keep(p);
  std::vector<MortonCode> codes;
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << (dim * level)); ++c) {
    if (keep(rng)) codes.push_back(c);
  }
  if (codes.empty()) codes.push_back(0);
  return DyadicSet::from_sorted_codes(dim, level, std::move(codes));
}

// Exhaustive minimum over every family of dyadic intervals of levels 0..3.
double brute_content_d1_l3(const DyadicSet& f, const GaugeFunction& h) {
  struct Iv {
    int level;
    std::uint64_t index;
  };
  std::vector<Iv> all;
  for (int l = 0; l <= 3; ++l) {
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << l); ++i) all.push_back({l, i});
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (1u << all.size()); ++mask) {
    double cost = 0;
    std::uint32_t covered = 0;  // bit per level-3 cell
    for (std::size_t k = 0; k < all.size(); ++k) {
      if (!(mask >> k & 1)) continue;
      cost += h(std::ldexp(1.0, -all[k].level));
      const int span = 3 - all[k].level;
      for (std::uint64_t c = all[k].index << span; c < (all[k].index + 1) << span; ++c) covered |= 1u << c;
    }
    bool ok = true;
    for (MortonCode c : f.codes()) ok = ok && (covered >> c & 1);
    if (ok) best = std::min(best, cost);
  }
  return best;
}

}  // namespace

TEST_CASE("net content equals the exhaustive minimum over dyadic covers") {
  std::mt19937_64 rng(21);
  for (double s : {0.3, 0.7, 1.0}) {
    for (int t = 0; t < 15; ++t) {
      const DyadicSet f = random_set(rng, 1, 3, 0.1 + 0.06 * t);
      const GaugeFunction h = GaugeFunction::power(s);
      CHECK(hausdorff_content_upper(f, h) == doctest::Approx(brute_content_d1_l3(f, h)).epsilon(1e-12));
    }
  }
}

TEST_CASE("optimal cover covers the set and prices at the content") {
  std::mt19937_64 rng(4);
  const DyadicSet f = random_set(rng, 2, 4, 0.3);
  const GaugeFunction h = GaugeFunction::power(1.2);
  const ContentCover cover = optimal_dyadic_cover(f, h);
  double cost = 0;
  std::vector<MortonCode> codes;
  for (const auto& q : cover.cubes) {
    cost += h(std::sqrt(2.0) * std::ldexp(1.0, -q.level));
    const DyadicSet cube = DyadicSet::from_cells(2, q.level, std::vector<CellIndex>{q.index}).refined(4);
    codes.insert(codes.end(), cube.codes().begin(), cube.codes().end());
  }
  CHECK(cost == doctest::Approx(cover.value).epsilon(1e-12));
  CHECK(is_subset(f, DyadicSet::from_codes(2, 4, codes)));
}

TEST_CASE("content is monotone under inclusion and full-torus content is the single cube") {
  std::mt19937_64 rng(8);
  const GaugeFunction h = GaugeFunction::power(0.5);
  for (int t = 0; t < 20; ++t) {
    const DyadicSet f = random_set(rng, 1, 6, 0.5);
    const DyadicSet g = set_union(f, random_set(rng, 1, 6, 0.2));
    CHECK(hausdorff_content_upper(f, h) <= hausdorff_content_upper(g, h) + 1e-15);
  }
  CHECK(hausdorff_content_upper(DyadicSet::full(2, 3), h) == doctest::Approx(h(std::sqrt(2.0))));
}

TEST_CASE("g_lower is a certified lower bound with a witness inside the set") {
  std::mt19937_64 rng(13);
  for (int d = 1; d <= 2; ++d) {
    for (int t = 0; t < 10; ++t) {
      const DyadicSet f = random_set(rng, d, d == 1 ? 8 : 5, 0.4);
      const GaugeFunction h = GaugeFunction::power(0.5 * d);
      const GLower g = g_lower(f, h);
      CHECK(g.value >= g_value(f, h) * (1 - 1e-12));
      CHECK(is_subset(g.witness, f));
      CHECK(g_value(g.witness, h) == doctest::Approx(g.value).epsilon(1e-9));
      // content dominates every g of a subset up to the √d diameter convention
      CHECK(hausdorff_content_upper(f, h) * std::pow(d, 0.25 * d) >= g.value);
    }
  }
}

TEST_CASE("leb split keeps a p fraction inside the set with the energy bound") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 6; ++t) {
    const DyadicSet f = random_set(rng, 1, 7, 0.6);
    const double s = 0.5;
    const double energy = set_energy(f, GaugeFunction::power(s));
    for (double p : {0.5, 0.25}) {
      const LebSplit split = lem_leb_split(f, p, s);
      CHECK(is_subset(split.set, f));
      CHECK(std::abs(measure(split.set) - p * measure(f)) <= split.set.cell_volume() * (1 + 1e-12));
      CHECK(set_energy(split.set, GaugeFunction::power(s)) <= 2 * p * p * energy * 1.05);
      CHECK(split.achieved_p == doctest::Approx(measure(split.set) / measure(f)));
    }
  }
  const DyadicSet f = random_set(rng, 2, 4, 0.5);
  CHECK(lem_leb_split(f, 1.0, 1.0).set == f);
}

TEST_CASE("near separation threshold") {
  for (int d = 1; d <= 3; ++d) {
    for (double s : {0.5, 1.0, 2.0}) {
      const int l = near_separation(d, s);
      CHECK(std::pow(1 + 2 * std::sqrt(d) / l, s) < 1.5);
      if (l > 1) CHECK(std::pow(1 + 2 * std::sqrt(d) / (l - 1), s) >= 1.5);
    }
  }
}

TEST_CASE("fat cantor measure and two-cubes construction") {
  const auto gaps = smith_volterra_gaps(12);
  CHECK(fat_cantor_limit_measure(gaps) == doctest::Approx(0.5).epsilon(1e-3));
  const DyadicSet f = fat_cantor(gaps, 16);
  CHECK(measure(f) >= 0.5 - 1e-12);
  CHECK(measure(f) <= 0.5 + 0.01);
  TwoCubesSpec spec;
  const TwoCubesSet a = example_two_cubes(spec);
  CHECK(measure(a.q1) == doctest::Approx(spec.r1 * spec.r1));
  CHECK(is_subset(a.f_q2, a.q2_cube));
  CHECK(measure(a.set) == doctest::Approx(measure(a.q1) + measure(a.f_q2)));
}
