#include "covlab/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace covlab {

namespace {

struct AxisCell {
  std::uint32_t index;
  double near2;  // squared distance from the centre to the nearest point
  double far2;   // squared distance to the farthest point
};

// Candidate cells along one axis for a ball of radius r around c.
std::vector<AxisCell> ball_axis(double c, double r, int level) {
  const std::int64_t n = std::int64_t{1} << level;
  const double h = std::ldexp(1.0, -level);
  std::int64_t lo = static_cast<std::int64_t>(std::floor((c - r) * static_cast<double>(n)));
  std::int64_t hi = static_cast<std::int64_t>(std::floor((c + r) * static_cast<double>(n)));
  if (hi - lo + 1 >= n) {
    lo = 0;
    hi = n - 1;
  }
  std::vector<AxisCell> out;
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t k = lo; k <= hi; ++k) {
    const std::int64_t idx = ((k % n) + n) % n;
    const double a = static_cast<double>(idx) * h;
    const double b = a + h;
    double near = 0.0;
    const double cw = wrap_unit(c);
    if (!(cw >= a && cw < b)) near = std::min(circle_distance(c, a), circle_distance(c, b));
    double far = std::max(circle_distance(c, a), circle_distance(c, b));
    const double anti = wrap_unit(c + 0.5);
    if (anti >= a && anti <= b) far = 0.5;
    out.push_back({static_cast<std::uint32_t>(idx), near * near, far * far});
  }
  return out;
}

// Cells along one axis meeting (lo, hi) in positive length (outer) or contained in it (inner).
std::vector<std::uint32_t> interval_axis(double lo, double hi, int level, RasterMode mode) {
  const std::int64_t n = std::int64_t{1} << level;
  std::vector<std::uint32_t> out;
  if (hi - lo >= 1.0) {
    out.resize(static_cast<std::size_t>(n));
    std::iota(out.begin(), out.end(), 0U);
    return out;
  }
  const double a = lo * static_cast<double>(n);
  const double b = hi * static_cast<double>(n);
  std::int64_t first = 0;
  std::int64_t last = -1;
  if (mode == RasterMode::outer) {
    first = static_cast<std::int64_t>(std::floor(a));
    last = static_cast<std::int64_t>(std::ceil(b)) - 1;
  } else {
    first = static_cast<std::int64_t>(std::ceil(a));
    last = static_cast<std::int64_t>(std::floor(b)) - 1;
  }
  if (last < first) return out;
  if (last - first + 1 >= n) {
    first = 0;
    last = n - 1;
  }
  out.reserve(static_cast<std::size_t>(last - first + 1));
  for (std::int64_t k = first; k <= last; ++k) out.push_back(static_cast<std::uint32_t>(((k % n) + n) % n));
  return out;
}

template <class AxisList, class Visit>
void odometer(int dim, const std::array<AxisList, kMaxDim>& axes, Visit&& visit) {
  for (int i = 0; i < dim; ++i) {
    if (axes[static_cast<std::size_t>(i)].empty()) return;
  }
  std::array<std::size_t, kMaxDim> pos{};
  while (true) {
    visit(pos);
    int i = 0;
    for (; i < dim; ++i) {
      auto& p = pos[static_cast<std::size_t>(i)];
      if (++p < axes[static_cast<std::size_t>(i)].size()) break;
      p = 0;
    }
    if (i == dim) return;
  }
}

}  // namespace

void append_ball_codes(std::vector<MortonCode>& out, const TorusPoint& center, double r, int level,
                       RasterMode mode) {
  const int dim = center.dim();
  check_dim_level(dim, level);
  if (!(r > 0.0)) throw std::invalid_argument("ball radius must be positive");
  std::array<std::vector<AxisCell>, kMaxDim> axes;
  for (int i = 0; i < dim; ++i) axes[static_cast<std::size_t>(i)] = ball_axis(center[i], r, level);
  const double r2 = r * r;
  odometer(dim, axes, [&](const std::array<std::size_t, kMaxDim>& pos) {
    double near2 = 0.0;
    double far2 = 0.0;
    CellIndex idx{};
    for (int i = 0; i < dim; ++i) {
      const auto& c = axes[static_cast<std::size_t>(i)][pos[static_cast<std::size_t>(i)]];
      near2 += c.near2;
      far2 += c.far2;
      idx[static_cast<std::size_t>(i)] = c.index;
    }
    const bool keep = mode == RasterMode::outer ? near2 < r2 : far2 <= r2;
    if (keep) out.push_back(encode_cell(dim, idx));
  });
}

void append_box_codes(std::vector<MortonCode>& out, int dim, const std::array<double, kMaxDim>& lo,
                      const std::array<double, kMaxDim>& hi, int level, RasterMode mode) {
  check_dim_level(dim, level);
  std::array<std::vector<std::uint32_t>, kMaxDim> axes;
  for (int i = 0; i < dim; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!(hi[k] > lo[k])) return;
    axes[k] = interval_axis(lo[k], hi[k], level, mode);
  }
  odometer(dim, axes, [&](const std::array<std::size_t, kMaxDim>& pos) {
    CellIndex idx{};
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      idx[k] = axes[k][pos[k]];
    }
    out.push_back(encode_cell(dim, idx));
  });
}

DyadicSet rasterize_ball(const TorusPoint& center, double r, int level, RasterMode mode) {
  std::vector<MortonCode> codes;
  append_ball_codes(codes, center, r, level, mode);
  return DyadicSet::from_codes(center.dim(), level, std::move(codes));
}

DyadicSet rasterize_rectangle(const TorusPoint& corner, std::span<const double> sides, int level,
                              RasterMode mode) {
  const int dim = corner.dim();
  if (sides.size() != static_cast<std::size_t>(dim)) throw std::invalid_argument("side count does not match dimension");
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};
  for (int i = 0; i < dim; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!(sides[k] > 0.0 && sides[k] <= 1.0)) throw std::invalid_argument("rectangle sides must lie in (0, 1]");
    lo[k] = corner[i];
    hi[k] = corner[i] + sides[k];
  }
  std::vector<MortonCode> codes;
  append_box_codes(codes, dim, lo, hi, level, mode);
  return DyadicSet::from_codes(dim, level, std::move(codes));
}

double fat_cantor_limit_measure(std::span<const double> gap_ratios) {
  double m = 1.0;
  for (double g : gap_ratios) m *= 1.0 - g;
  return m;
}

std::vector<double> smith_volterra_gaps(int stages) {
  std::vector<double> g;
  for (int k = 1; k <= stages; ++k) g.push_back(1.0 / (std::ldexp(1.0, k) + 2.0));
  return g;
}

std::vector<std::pair<double, double>> fat_cantor_intervals(std::span<const double> gap_ratios, double min_gap) {
  for (double g : gap_ratios) {
    if (!(g >= 0.0 && g < 1.0)) throw std::invalid_argument("gap ratios must lie in [0, 1)");
  }
  if (!(fat_cantor_limit_measure(gap_ratios) > 0.0)) {
    throw std::invalid_argument("gap schedule has zero limiting measure");
  }
  std::vector<std::pair<double, double>> intervals{{0.0, 1.0}};
  for (double g : gap_ratios) {
    const double len = intervals.front().second - intervals.front().first;
    if (g * len < min_gap) break;
    std::vector<std::pair<double, double>> next;
    next.reserve(intervals.size() * 2);
    for (auto [a, b] : intervals) {
      const double l = b - a;
      next.emplace_back(a, a + 0.5 * l * (1.0 - g));
      next.emplace_back(a + 0.5 * l * (1.0 + g), b);
    }
    intervals = std::move(next);
  }
  return intervals;
}

DyadicSet fat_cantor(std::span<const double> gap_ratios, int level) {
  check_dim_level(1, level);
  const auto intervals = fat_cantor_intervals(gap_ratios, std::ldexp(1.0, -level));
  std::vector<MortonCode> codes;
  for (auto [a, b] : intervals) {
    append_box_codes(codes, 1, {a, 0, 0}, {b, 0, 0}, level, RasterMode::inner);
  }
  return DyadicSet::from_codes(1, level, std::move(codes));
}

namespace {

bool circular_overlap(double a0, double la, double b0, double lb) {
  // Open intervals (a0, a0+la) and (b0, b0+lb) on R/Z.
  if (la >= 1.0 || lb >= 1.0) return true;
  const double d = wrap_unit(b0 - a0);
  return d < la || d + lb > 1.0;
}

}  // namespace

TwoCubesSet example_two_cubes(const TwoCubesSpec& spec) {
  const int dim = spec.dim;
  check_dim_level(dim, spec.level);
  if (!(spec.r1 > 0 && spec.r1 <= 1 && spec.r2 > 0 && spec.r2 <= 1)) {
    throw std::invalid_argument("cube sides must lie in (0, 1]");
  }
  if (!(spec.rho > 0.0 && spec.rho <= 1.0)) throw std::invalid_argument("rho must lie in (0, 1]");
  if (spec.subdivisions < 0) throw std::invalid_argument("negative subdivision level");
  std::vector<double> c1 = spec.q1_corner;
  std::vector<double> c2 = spec.q2_corner;
  if (c1.empty()) c1.assign(static_cast<std::size_t>(dim), 0.0);
  if (c2.empty()) {
    c2.assign(static_cast<std::size_t>(dim), 0.0);
    c2[0] = 0.5;
  }
  if (c1.size() != static_cast<std::size_t>(dim) || c2.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("corner dimension mismatch");
  }
  bool overlap = true;
  for (int i = 0; i < dim; ++i) {
    const auto k = static_cast<std::size_t>(i);
    overlap = overlap && circular_overlap(c1[k], spec.r1, c2[k], spec.r2);
  }
  if (overlap) throw std::invalid_argument("cubes Q1 and Q2 overlap");

  TwoCubesSet out;
  const std::vector<double> s1(static_cast<std::size_t>(dim), spec.r1);
  const std::vector<double> s2(static_cast<std::size_t>(dim), spec.r2);
  out.q1 = rasterize_rectangle(TorusPoint(dim, c1), s1, spec.level, RasterMode::outer);
  out.q2_cube = rasterize_rectangle(TorusPoint(dim, c2), s2, spec.level, RasterMode::outer);

  const std::uint64_t per_axis = std::uint64_t{1} << spec.subdivisions;
  const double sub = spec.r2 / static_cast<double>(per_axis);
  const double shrunk = spec.rho * sub;
  const double inset = 0.5 * (sub - shrunk);
  std::vector<MortonCode> codes;
  std::array<std::uint64_t, kMaxDim> j{};
  const std::uint64_t total = std::uint64_t{1} << (spec.subdivisions * dim);
  for (std::uint64_t t = 0; t < total; ++t) {
    std::uint64_t rest = t;
    std::array<double, kMaxDim> lo{};
    std::array<double, kMaxDim> hi{};
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      j[k] = rest % per_axis;
      rest /= per_axis;
      lo[k] = c2[k] + static_cast<double>(j[k]) * sub + inset;
      hi[k] = lo[k] + shrunk;
    }
    append_box_codes(codes, dim, lo, hi, spec.level, RasterMode::outer);
  }
  out.f_q2 = DyadicSet::from_codes(dim, spec.level, std::move(codes));
  out.set = set_union(out.q1, out.f_q2);
  return out;
}

}  // namespace covlab
