#include <cmath>
#include <map>
#include <random>

#include "covlab/autocorrelation.hpp"
#include "covlab/energy.hpp"
#include "covlab/shapes.hpp"
#include "doctest.h"

using namespace covlab;

namespace {

// ∬_{[0,L]²} |x-y|^{-s} = 2 L^{2-s} / ((1-s)(2-s)); torus distances agree for L ≤ 1/2.
double interval_energy(double len, double s) { return 2.0 * std::pow(len, 2.0 - s) / ((1.0 - s) * (2.0 - s)); }

// Plain Monte Carlo over A×B with its standard error.
std::pair<double, double> monte_carlo(int d, const DyadicCell& a, const DyadicCell& b, double s, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double ha = std::ldexp(1.0, -a.level), hb = std::ldexp(1.0, -b.level);
  double sum = 0, sum2 = 0;
  for (int k = 0; k < n; ++k) {
    double r2 = 0;
    for (int i = 0; i < d; ++i) {
      const double x = (a.index[static_cast<std::size_t>(i)] + u(rng)) * ha;
      const double y = (b.index[static_cast<std::size_t>(i)] + u(rng)) * hb;
      const double c = circle_distance(x, y);
      r2 += c * c;
    }
    if (r2 == 0.0) {
      --k;  // measure-zero coincidence: resample
      continue;
    }
    const double v = std::pow(std::sqrt(r2), -s);
    sum += v;
    sum2 += v * v;
  }
  const double vol = std::pow(ha * hb, d);
  const double mean = sum / n;
  return {mean * vol, std::sqrt((sum2 / n - mean * mean) / n) * vol};
}

}  // namespace

TEST_CASE("interval energies match the closed form") {
  for (double s : {0.2, 0.5, 0.8}) {
    for (int k = 1; k <= 5; ++k) {
      const double len = std::ldexp(1.0, -k);
      const auto iv = rasterize_rectangle(TorusPoint::of({0.0}), std::vector<double>{len}, 10, RasterMode::inner);
      CHECK(set_energy(iv, GaugeFunction::power(s)) == doctest::Approx(interval_energy(len, s)).epsilon(2e-3));
    }
  }
}

TEST_CASE("cell pair energies agree with Monte Carlo") {
  const double s = 0.6;
  const GaugeFunction h = GaugeFunction::power(s);
  const DyadicCell a{3, {2, 2, 0}};
  for (const DyadicCell& b : {DyadicCell{3, {2, 2, 0}}, DyadicCell{3, {3, 2, 0}}, DyadicCell{3, {3, 3, 0}},
                              DyadicCell{3, {6, 1, 0}}}) {
    const double e = cell_pair_energy(2, a, b, h);
    const auto [mc, se] = monte_carlo(2, a, b, s, 400000, 17);
    CHECK(std::abs(e - mc) <= 4.0 * se + 2e-3 * e);
    CHECK(cell_pair_energy(2, b, a, h) == doctest::Approx(e).epsilon(1e-12));
  }
}

TEST_CASE("set energy equals the brute pairwise sum") {
  std::mt19937_64 rng(2);
  for (int d = 1; d <= 3; ++d) {
    const int l = d == 3 ? 2 : 3;
    std::vector<MortonCode> codes;
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << (d * l)); ++c) {
      if (rng() % 3 == 0) codes.push_back(c);
    }
    const DyadicSet f = DyadicSet::from_sorted_codes(d, l, codes);
    const GaugeFunction h = GaugeFunction::power(0.5 * d);
    double brute = 0;
    for (const auto& a : f.cells()) {
      for (const auto& b : f.cells()) brute += cell_pair_energy(d, {l, a}, {l, b}, h);
    }
    CHECK(set_energy(f, h) == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("energy scales as lambda^(2d - s) under dyadic dilation") {
  const double s = 0.7;
  const std::vector<CellIndex> cells{{0, 0, 0}, {1, 0, 0}, {3, 1, 0}, {2, 3, 0}};
  const DyadicSet big = DyadicSet::from_cells(2, 3, cells);
  const DyadicSet small = DyadicSet::from_cells(2, 4, cells);
  const GaugeFunction h = GaugeFunction::power(s);
  CHECK(set_energy(small, h) / set_energy(big, h) == doctest::Approx(std::pow(0.5, 4.0 - s)).epsilon(2e-3));
}

TEST_CASE("autocorrelation routes agree") {
  std::mt19937_64 rng(9);
  std::vector<MortonCode> codes;
  for (std::uint64_t c = 0; c < 256; ++c) {
    if (rng() % 4 == 0) codes.push_back(c);
  }
  const DyadicSet f = DyadicSet::from_sorted_codes(2, 4, codes);
  std::vector<double> w(f.size());
  for (auto& x : w) x = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
  for (bool weighted : {false, true}) {
    const auto a = autocorrelation(f, weighted ? std::span<const double>(w) : std::span<const double>{}, CorrelationRoute::direct);
    const auto b = autocorrelation(f, weighted ? std::span<const double>(w) : std::span<const double>{}, CorrelationRoute::fft);
    REQUIRE(a.offsets.size() == b.offsets.size());
    std::map<Offset, double> fft;
    for (std::size_t i = 0; i < b.offsets.size(); ++i) fft[b.offsets[i]] = b.values[i];
    double total = 0;
    for (std::size_t i = 0; i < a.offsets.size(); ++i) {
      REQUIRE(fft.count(a.offsets[i]) == 1);
      CHECK(a.values[i] == doctest::Approx(fft[a.offsets[i]]).epsilon(1e-9));
      total += a.values[i];
    }
    double mass = 0;
    for (double x : w) mass += x;
    CHECK(total == doctest::Approx(weighted ? mass * mass : double(f.size() * f.size())));
  }
}

TEST_CASE("uniform measure energy is set energy over measure squared") {
  const DyadicSet f = rasterize_ball(TorusPoint::of({0.5, 0.5}), 0.2, 5, RasterMode::inner);
  const GaugeFunction h = GaugeFunction::power(1.0);
  const double l = measure(f);
  CHECK(measure_energy(DiscreteMeasure::uniform(f), h) == doctest::Approx(set_energy(f, h) / (l * l)).epsilon(1e-9));
  CHECK(g_value(f, h) == doctest::Approx(l * l / set_energy(f, h)).epsilon(1e-9));
}

TEST_CASE("divergent and empty energies") {
  const DyadicSet f = DyadicSet::full(1, 3);
  CHECK(std::isinf(set_energy(f, GaugeFunction::power(1.0))));
  CHECK(g_value(f, GaugeFunction::power(1.0)) == 0.0);
  CHECK(set_energy(DyadicSet(1, 3), GaugeFunction::power(0.5)) == 0.0);
  CHECK(g_value(DyadicSet(1, 3), GaugeFunction::power(0.5)) == 0.0);
}

TEST_CASE("log gauge energies are finite and dominate the power-d energy") {
  const GaugeFunction h = GaugeFunction::power_log(1, 2.0);
  CHECK(h.integrable(1));
  CHECK(!GaugeFunction::power(1.0).integrable(1));
  const DyadicSet b = rasterize_ball(TorusPoint::of({0.5}), 0.05, 10, RasterMode::inner);
  const double e = set_energy(b, h);
  CHECK(std::isfinite(e));
  CHECK(e > 0.0);
}

TEST_CASE("gauge validation") {
  CHECK_THROWS(GaugeFunction::tabulated(1, {0.1, 0.2}, {0.2, 0.1}));
  const GaugeFunction t = GaugeFunction::tabulated(1, {0.01, 0.1, 1.0}, {0.1, std::sqrt(0.1), 1.0});
  CHECK(t(0.05) == doctest::Approx(std::sqrt(0.05)).epsilon(1e-9));
  CHECK(GaugeFunction::power(0.5)(0.25) == doctest::Approx(0.5));
}
