#include <cmath>
#include <set>

#include "covlab/sampling.hpp"
#include "doctest.h"

using namespace covlab;

TEST_CASE("uniform centers pass a chi-square test") {
  // 64 bins, 63 degrees of freedom; the 0.999 quantile is about 103.4.
  const auto pts = sample_centers(SamplingDistribution::uniform(2), 64000, 99);
  std::vector<int> bins(64, 0);
  for (const auto& p : pts) ++bins[static_cast<std::size_t>(int(p[0] * 8) * 8 + int(p[1] * 8))];
  double chi2 = 0;
  for (int b : bins) chi2 += (b - 1000.0) * (b - 1000.0) / 1000.0;
  CHECK(chi2 < 103.4);
}

TEST_CASE("density centers follow the cell masses") {
  DiscreteMeasure mu;
  mu.support = DyadicSet::from_codes(1, 2, {0, 1, 3});
  mu.weights = {1.0, 2.0, 5.0};
  const SamplingDistribution dist = SamplingDistribution::density(mu);
  CHECK(dist.measure().total_mass() == doctest::Approx(1.0));
  const auto pts = sample_centers(dist, 80000, 5);
  std::vector<double> counts(4, 0);
  for (const auto& p : pts) counts[static_cast<std::size_t>(p[0] * 4)] += 1;
  CHECK(counts[2] == 0);
  // 2 degrees of freedom; the 0.999 quantile is about 13.8.
  const double expect[] = {10000, 20000, 0, 50000};
  double chi2 = 0;
  for (int i : {0, 1, 3}) chi2 += std::pow(counts[static_cast<std::size_t>(i)] - expect[i], 2) / expect[i];
  CHECK(chi2 < 13.8);
}

TEST_CASE("sampling is a pure function of the seed") {
  const auto a = sample_centers(SamplingDistribution::uniform(3), 100, 42);
  const auto b = sample_centers(SamplingDistribution::uniform(3), 100, 42);
  const auto c = sample_centers(SamplingDistribution::uniform(3), 100, 43);
  bool same = true, differ = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      same = same && a[i][k] == b[i][k];
      differ = differ || a[i][k] != c[i][k];
      CHECK(a[i][k] >= 0.0);
      CHECK(a[i][k] < 1.0);
    }
  }
  CHECK(same);
  CHECK(differ);
  CHECK_THROWS(sample_centers(SamplingDistribution::uniform(1), 0, 1));
}

TEST_CASE("trial seeds are distinct and fixed") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 1000; ++t) seen.insert(trial_seed(7, t));
  CHECK(seen.size() == 1000);
  CHECK(trial_seed(7, 3) == splitmix64(7 + 0x9E3779B97F4A7C15ull * 4));
  // splitmix64 reference value for input 0
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
}
