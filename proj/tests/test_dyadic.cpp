#include <set>
#include <random>
#include <sstream>

#include "covlab/dyadic.hpp"
#include "doctest.h"

using namespace covlab;

namespace {

// Brute-force model: a set at level l as a bitmap over row-major indices.
std::vector<bool> bitmap(const DyadicSet& s) {
  const std::uint64_t n = s.cells_per_axis();
  std::vector<bool> out(s.grid_size(), false);
  for (const auto& c : s.cells()) {
    std::uint64_t k = 0;
    for (int i = s.dim() - 1; i >= 0; --i) k = k * n + c[static_cast<std::size_t>(i)];
    out[k] = true;
  }
  return out;
}

DyadicSet random_cells(std::mt19937_64& rng, int dim, int level, double p) {
  std::bernoulli_distribution keep(p);
  std::vector<MortonCode> codes;
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << (dim * level)); ++c) {
    if (keep(rng)) codes.push_back(c);
  }
  return DyadicSet::from_sorted_codes(dim, level, std::move(codes));
}

}  // namespace

TEST_CASE("morton codes round trip and order children contiguously") {
  for (int d = 1; d <= 3; ++d) {
    const int l = max_level(d);
    std::mt19937_64 rng(d);
    for (int t = 0; t < 1000; ++t) {
      CellIndex idx{};
      for (int i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(rng() >> (64 - l));
      const MortonCode c = encode_cell(d, idx);
      CHECK(decode_cell(d, c) == idx);
      // parent = code >> d halves every index
      const CellIndex parent = decode_cell(d, c >> d);
      for (int i = 0; i < d; ++i) CHECK(parent[static_cast<std::size_t>(i)] == idx[static_cast<std::size_t>(i)] / 2);
    }
  }
}

TEST_CASE("level caps") {
  CHECK(max_level(1) == 24);
  CHECK(max_level(2) == 12);
  CHECK(max_level(3) == 8);
  CHECK_THROWS(check_dim_level(2, 13));
  CHECK_THROWS(check_dim_level(4, 1));
}

TEST_CASE("set algebra agrees with a bitmap model") {
  std::mt19937_64 rng(7);
  for (int d = 1; d <= 3; ++d) {
    for (int trial = 0; trial < 20; ++trial) {
      const int l = 1 + static_cast<int>(rng() % (d == 3 ? 3 : 4));
      const DyadicSet a = random_cells(rng, d, l, 0.4);
      const DyadicSet b = random_cells(rng, d, l, 0.6);
      const auto ma = bitmap(a), mb = bitmap(b);
      const auto mu = bitmap(set_union(a, b)), mi = bitmap(set_intersection(a, b)), md = bitmap(set_difference(a, b));
      bool subset = true;
      for (std::size_t k = 0; k < ma.size(); ++k) {
        CHECK(mu[k] == (ma[k] || mb[k]));
        CHECK(mi[k] == (ma[k] && mb[k]));
        CHECK(md[k] == (ma[k] && !mb[k]));
        subset = subset && (!ma[k] || mb[k]);
      }
      CHECK(is_subset(a, b) == subset);
      CHECK(measure(a) == doctest::Approx(static_cast<double>(a.size()) * a.cell_volume()));
    }
  }
}

TEST_CASE("refinement preserves the point set and coarsening is outer") {
  std::mt19937_64 rng(11);
  for (int d = 1; d <= 2; ++d) {
    const DyadicSet a = random_cells(rng, d, 3, 0.5);
    const DyadicSet fine = a.refined(5);
    CHECK(fine == a);
    CHECK(measure(fine) == doctest::Approx(measure(a)));
    const DyadicSet coarse = fine.coarsened(2);
    CHECK(is_subset(a, coarse.refined(3)));
    CHECK(count_positive_cells(fine, 2) == coarse.size());
    CHECK(count_positive_cells(fine, 5) == fine.size());
  }
}

TEST_CASE("count_positive_cells matches a brute count") {
  std::mt19937_64 rng(3);
  const DyadicSet a = random_cells(rng, 2, 5, 0.05);
  for (int l = 0; l <= 5; ++l) {
    std::set<MortonCode> parents;
    for (MortonCode c : a.codes()) parents.insert(c >> (2 * (5 - l)));
    CHECK(count_positive_cells(a, l) == parents.size());
  }
}

TEST_CASE("whole-cell shifts wrap on the torus") {
  const DyadicSet a = DyadicSet::from_cells(2, 3, std::vector<CellIndex>{{7, 0, 0}});
  const std::vector<std::int64_t> shift{1, -1};
  const DyadicSet b = shift_cells(a, shift);
  CHECK(b.cells().front() == CellIndex{0, 7, 0});
  const auto t = translate(a, TorusPoint::of({0.125 + 0.01, 0.0}));
  CHECK(t.snap_error == doctest::Approx(0.01));
  CHECK(t.set.cells().front() == CellIndex{0, 0, 0});
}

TEST_CASE("torus distance takes the shorter way round") {
  CHECK(circle_distance(0.05, 0.95) == doctest::Approx(0.1));
  CHECK(torus_distance(TorusPoint::of({0.05, 0.5}), TorusPoint::of({0.95, 0.5})) == doctest::Approx(0.1));
  CHECK(wrap_unit(-0.25) == doctest::Approx(0.75));
}

TEST_CASE("text format round trips") {
  std::mt19937_64 rng(5);
  const DyadicSet a = random_cells(rng, 3, 2, 0.5);
  CHECK(from_text(to_text(a)) == a);
  CHECK_THROWS(from_text("2 3 1\n9 0\n"));
}

TEST_CASE("from_codes sorts and deduplicates") {
  const DyadicSet a = DyadicSet::from_codes(1, 3, {5, 1, 5, 2});
  CHECK(a.codes() == std::vector<MortonCode>{1, 2, 5});
  CHECK(DyadicSet::full(2, 2).is_full());
}
