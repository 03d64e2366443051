#include "covlab/content.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace covlab {

namespace {

struct DpLevel {
  std::vector<MortonCode> codes;
  std::vector<double> cost;
  std::vector<char> coarse;             // node chosen as a single cube
  std::vector<std::size_t> child_begin;  // range into the next finer level
};

std::vector<DpLevel> run_dp(const DyadicSet& f, const GaugeFunction& h) {
  const int dim = f.dim();
  const int top = f.level();
  std::vector<DpLevel> levels(static_cast<std::size_t>(top) + 1);
  const double root_d = std::sqrt(static_cast<double>(dim));
  DpLevel& leaf = levels[static_cast<std::size_t>(top)];
  leaf.codes = f.codes();
  leaf.cost.assign(leaf.codes.size(), h(root_d * std::ldexp(1.0, -top)));
  leaf.coarse.assign(leaf.codes.size(), 1);
  leaf.child_begin.assign(leaf.codes.size() + 1, 0);
  for (int k = top - 1; k >= 0; --k) {
    const DpLevel& fine = levels[static_cast<std::size_t>(k) + 1];
    DpLevel& node = levels[static_cast<std::size_t>(k)];
    const double cube = h(root_d * std::ldexp(1.0, -k));
    std::size_t i = 0;
    while (i < fine.codes.size()) {
      const MortonCode parent = fine.codes[i] >> dim;
      double sum = 0.0;
      node.child_begin.push_back(i);
      while (i < fine.codes.size() && (fine.codes[i] >> dim) == parent) sum += fine.cost[i++];
      node.codes.push_back(parent);
      const bool take = cube <= sum;
      node.cost.push_back(take ? cube : sum);
      node.coarse.push_back(take ? 1 : 0);
    }
    node.child_begin.push_back(i);
  }
  return levels;
}

}  // namespace

double hausdorff_content_upper(const DyadicSet& f, const GaugeFunction& h) {
  if (f.empty()) return 0.0;
  return run_dp(f, h)[0].cost[0];
}

ContentCover optimal_dyadic_cover(const DyadicSet& f, const GaugeFunction& h) {
  ContentCover out;
  if (f.empty()) return out;
  const auto levels = run_dp(f, h);
  out.value = levels[0].cost[0];
  // Depth-first over (level, position) pairs.
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [k, pos] = stack.back();
    stack.pop_back();
    const DpLevel& node = levels[static_cast<std::size_t>(k)];
    if (node.coarse[pos]) {
      out.cubes.push_back({k, decode_cell(f.dim(), node.codes[pos])});
      continue;
    }
    for (std::size_t c = node.child_begin[pos + 1]; c-- > node.child_begin[pos];) stack.emplace_back(k + 1, c);
  }
  return out;
}

int near_separation(int dim, double s) {
  const double root = 2.0 * std::sqrt(static_cast<double>(dim));
  int l = 1;
  while (std::pow(1.0 + root / l, s) >= 1.5) ++l;
  return l;
}

namespace {

// Σ E(b - a) over cell pairs of f whose level-n cubes are within l0 cube
// sides of each other (torus gap), n ≤ f.level().
double near_energy(const DyadicSet& f, int n, PairEnergyTable& table, int l0) {
  const int dim = f.dim();
  const int shift = dim * (f.level() - n);
  if (shift == 0) {
    // Cubes are cells: nearness depends on the offset alone.
    const OffsetTable corr = autocorrelation(f);
    double near = 0.0;
    for (std::size_t r = 0; r < corr.values.size(); ++r) {
      std::int64_t sum = 0;
      for (int i = 0; i < dim; ++i) {
        const std::int64_t gap = std::max<std::int64_t>(0, std::abs(corr.offsets[r][static_cast<std::size_t>(i)]) - 1);
        sum += gap * gap;
      }
      if (sum >= static_cast<std::int64_t>(l0) * l0) continue;
      const double e = table(corr.offsets[r]);
      if (!std::isfinite(e)) return e;
      near += corr.values[r] * e;
    }
    return near;
  }
  const std::int64_t cubes = std::int64_t{1} << n;
  const std::int64_t cells_n = static_cast<std::int64_t>(f.cells_per_axis());

  std::set<std::array<std::int64_t, kMaxDim>> deltas;
  const std::int64_t width = 2 * l0 + 1;
  std::int64_t total = 1;
  for (int i = 0; i < dim; ++i) total *= width;
  for (std::int64_t t = 0; t < total; ++t) {
    std::array<std::int64_t, kMaxDim> o{};
    std::int64_t rest = t;
    std::int64_t sum = 0;
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      std::int64_t d = (rest % width - l0) % cubes;
      rest /= width;
      if (d < 0) d += cubes;
      if (d > cubes / 2) d -= cubes;
      o[k] = d;
      const std::int64_t gap = std::max<std::int64_t>(0, std::abs(d) - 1);
      sum += gap * gap;
    }
    if (sum < static_cast<std::int64_t>(l0) * l0) deltas.insert(o);
  }

  const auto& codes = f.codes();
  double near = 0.0;
  std::size_t i = 0;
  while (i < codes.size()) {
    const MortonCode q = codes[i] >> shift;
    std::size_t j = i;
    while (j < codes.size() && (codes[j] >> shift) == q) ++j;
    const CellIndex qi = decode_cell(dim, q);
    for (const auto& d : deltas) {
      CellIndex qn{};
      for (int a = 0; a < dim; ++a) {
        const auto k = static_cast<std::size_t>(a);
        qn[k] = static_cast<std::uint32_t>(((static_cast<std::int64_t>(qi[k]) + d[k]) % cubes + cubes) % cubes);
      }
      const MortonCode lo_code = encode_cell(dim, qn) << shift;
      const MortonCode hi_code = lo_code + (MortonCode{1} << shift);
      const auto lo = std::lower_bound(codes.begin(), codes.end(), lo_code);
      const auto hi = std::lower_bound(lo, codes.end(), hi_code);
      for (std::size_t r = i; r < j; ++r) {
        const CellIndex ca = decode_cell(dim, codes[r]);
        for (auto it = lo; it != hi; ++it) {
          const CellIndex cb = decode_cell(dim, *it);
          std::array<std::int64_t, kMaxDim> off{};
          for (int a = 0; a < dim; ++a) {
            const auto k = static_cast<std::size_t>(a);
            off[k] = (static_cast<std::int64_t>(cb[k]) - static_cast<std::int64_t>(ca[k])) % cells_n;
          }
          const double e = table(std::span<const std::int64_t>(off.data(), static_cast<std::size_t>(dim)));
          if (!std::isfinite(e)) return e;
          near += e;
        }
      }
    }
    i = j;
  }
  return near;
}

}  // namespace

LebSplit lem_leb_split(const DyadicSet& f, double p, double s, double tol, int max_extra_levels) {
  if (f.empty()) throw std::invalid_argument("lem_leb_split needs a set of positive measure");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
  const int dim = f.dim();
  if (!(s > 0.0 && s < dim)) throw std::invalid_argument("s must lie in (0, d)");
  LebSplit out;
  out.requested_p = p;
  if (p == 1.0) {
    out.set = f;
    return out;
  }
  const GaugeFunction g = GaugeFunction::power(s);
  const int top = f.level();
  PairEnergyTable table(dim, top, g, tol);
  const double energy = set_energy(f, table);
  const double target = 0.5 * p * p * energy;
  const int l0 = near_separation(dim, s);

  // Near energy only shrinks as the cube grid refines; scan down from the
  // cell level to the coarsest level that still meets the target.
  int grid = -1;
  double near_value = 0.0;
  for (int n = top; n >= 0; --n) {
    const double v = near_energy(f, n, table, l0);
    if (!(v < target)) break;
    grid = n;
    near_value = v;
  }
  DyadicSet base = f;
  if (grid < 0) {
    // The cube grid must be finer than the cells of F.
    const int cap = std::min(max_level(dim), top + std::max(1, max_extra_levels));
    for (int n = top + 1; n <= cap; ++n) {
      if (static_cast<std::uint64_t>(f.size()) << (dim * (n - top)) > kMaxCells) break;
      DyadicSet fine = f.refined(n);
      PairEnergyTable fine_table(dim, n, g, tol);
      near_value = near_energy(fine, n, fine_table, l0);
      grid = n;
      base = std::move(fine);
      if (near_value < target) break;
    }
    if (grid < 0) throw ResourceLimitError("lem_leb_split cannot refine beyond the level cap");
  }
  out.grid_level = grid;
  out.near_ratio = energy > 0.0 ? near_value / energy : 0.0;
  out.criterion_met = near_value < target;

  // Refine until the smallest kept fraction spans at least four cells.
  const int shift0 = dim * (base.level() - grid);
  std::size_t min_count = base.size();
  {
    std::size_t i = 0;
    const auto& codes = base.codes();
    while (i < codes.size()) {
      const MortonCode q = codes[i] >> shift0;
      std::size_t j = i;
      while (j < codes.size() && (codes[j] >> shift0) == q) ++j;
      min_count = std::min(min_count, j - i);
      i = j;
    }
  }
  int work = base.level();
  const int work_cap = std::min(max_level(dim), f.level() + std::max(1, max_extra_levels) + 2);
  while (p * static_cast<double>(min_count) * std::ldexp(1.0, dim * (work - base.level())) < 4.0 &&
         work < work_cap && (static_cast<std::uint64_t>(base.size()) << (dim * (work + 1 - base.level()))) <= kMaxCells) {
    ++work;
  }
  if (work != base.level()) base = base.refined(work);

  const int shift = dim * (work - grid);
  const auto& codes = base.codes();
  std::vector<MortonCode> kept;
  kept.reserve(static_cast<std::size_t>(p * static_cast<double>(codes.size())) + 1);
  double cumulative = 0.0;
  long long taken = 0;
  std::size_t i = 0;
  while (i < codes.size()) {
    const MortonCode q = codes[i] >> shift;
    std::size_t j = i;
    while (j < codes.size() && (codes[j] >> shift) == q) ++j;
    const std::size_t m = j - i;
    cumulative += p * static_cast<double>(m);
    const long long want = std::llround(cumulative) - taken;
    const auto k = static_cast<std::size_t>(std::clamp<long long>(want, 0, static_cast<long long>(m)));
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t pick = (2 * r + 1) * m / (2 * k);
      kept.push_back(codes[i + pick]);
    }
    taken += static_cast<long long>(k);
    i = j;
  }
  out.set = DyadicSet::from_sorted_codes(dim, work, std::move(kept));
  out.achieved_p = static_cast<double>(out.set.size()) / static_cast<double>(codes.size());
  return out;
}

namespace {

struct Candidate {
  double g = 0.0;
  DyadicSet set;
  std::string kind;
};

class TableCache {
 public:
  TableCache(int dim, GaugeFunction h, double tol) : dim_(dim), h_(std::move(h)), tol_(tol) {}
  PairEnergyTable& at(int level) {
    auto it = tables_.find(level);
    if (it == tables_.end()) it = tables_.emplace(level, PairEnergyTable(dim_, level, h_, tol_)).first;
    return it->second;
  }

 private:
  int dim_;
  GaugeFunction h_;
  double tol_;
  std::map<int, PairEnergyTable> tables_;
};

}  // namespace

GLower g_lower(const DyadicSet& f, const GaugeFunction& h, const GLowerOptions& options) {
  GLower out;
  if (f.empty()) {
    out.witness = f;
    out.witness_kind = "empty";
    return out;
  }
  const int dim = f.dim();
  const int top = f.level();
  TableCache tables(dim, h, options.tol);
  // Best candidates so far, descending in g; only these keep their sets.
  const std::size_t keep = static_cast<std::size_t>(std::max(1, options.thin_top));
  std::vector<Candidate> pool;
  auto best_g = [&] { return pool.empty() ? 0.0 : pool.front().g; };
  auto consider = [&](double gv, auto&& make_set, const char* kind) {
    ++out.candidates;
    if (pool.size() == keep && gv <= pool.back().g) return;
    auto pos = std::find_if(pool.begin(), pool.end(), [&](const Candidate& c) { return c.g < gv; });
    pool.insert(pos, Candidate{gv, make_set(), kind});
    if (pool.size() > keep) pool.pop_back();
  };

  consider(g_value(f, tables.at(top)), [&] { return f; }, "self");

  if (options.localize) {
    const double root_d = std::sqrt(static_cast<double>(dim));
    std::set<std::vector<MortonCode>> seen;
    const auto& codes = f.codes();
    for (int k = 1; k <= top; ++k) {
      // g(F ∩ Q) ≤ h(diam Q), and diam shrinks with k.
      if (h(root_d * std::ldexp(1.0, -k)) <= best_g()) break;
      const int shift = dim * (top - k);
      std::size_t i = 0;
      while (i < codes.size()) {
        const MortonCode q = codes[i] >> shift;
        std::size_t j = i;
        while (j < codes.size() && (codes[j] >> shift) == q) ++j;
        if (j - i == codes.size()) {
          i = j;
          continue;  // same as F
        }
        const MortonCode base = q << shift;
        std::vector<MortonCode> local;
        local.reserve(j - i);
        for (std::size_t r = i; r < j; ++r) local.push_back(codes[r] - base);
        if (seen.insert(local).second) {
          // Torus energies are translation invariant, so the local copy has the same g.
          const DyadicSet shape = DyadicSet::from_sorted_codes(dim, top, std::move(local));
          const double gv = g_value(shape, tables.at(top));
          consider(
              gv,
              [&] {
                return DyadicSet::from_sorted_codes(
                    dim, top,
                    std::vector<MortonCode>(codes.begin() + static_cast<std::ptrdiff_t>(i),
                                            codes.begin() + static_cast<std::ptrdiff_t>(j)));
              },
              "cube");
        }
        i = j;
      }
    }
  }

  if (options.thin && !options.thin_fractions.empty()) {
    // Thinning is a candidate generator only; candidates are scored under h.
    const double s = h.kind() == GaugeFunction::Kind::power && h.exponent() < dim ? h.exponent() : 0.5 * dim;
    const std::size_t top_n = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(std::max(0, options.thin_top)));
    const std::vector<Candidate> leaders(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(top_n));
    std::vector<Candidate> thinned;
    for (const Candidate& c : leaders) {
      if (c.set.size() > options.thin_max_cells) continue;
      for (double p : options.thin_fractions) {
        if (!(p > 0.0 && p < 1.0)) continue;
        try {
          LebSplit split = lem_leb_split(c.set, p, s, options.tol, options.thin_max_extra_levels);
          if (split.set.empty()) continue;
          const double gv = g_value(split.set, tables.at(split.set.level()));
          thinned.push_back({gv, std::move(split.set), "thinned"});
        } catch (const ResourceLimitError&) {
          // Thinning needs a finer grid than the caps allow; skip this candidate.
        }
      }
    }
    for (auto& c : thinned) consider(c.g, [&] { return std::move(c.set); }, "thinned");
  }

  out.value = pool.front().g;
  out.witness = std::move(pool.front().set);
  out.witness_kind = pool.front().kind;
  return out;
}

}  // namespace covlab
