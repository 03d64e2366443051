#include "covlab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace covlab {

namespace {

std::uint64_t spread2(std::uint64_t x) {
  x &= 0xffffffffULL;
  x = (x | (x << 16)) & 0x0000ffff0000ffffULL;
  x = (x | (x << 8)) & 0x00ff00ff00ff00ffULL;
  x = (x | (x << 4)) & 0x0f0f0f0f0f0f0f0fULL;
  x = (x | (x << 2)) & 0x3333333333333333ULL;
  x = (x | (x << 1)) & 0x5555555555555555ULL;
  return x;
}

std::uint64_t compact2(std::uint64_t x) {
  x &= 0x5555555555555555ULL;
  x = (x | (x >> 1)) & 0x3333333333333333ULL;
  x = (x | (x >> 2)) & 0x0f0f0f0f0f0f0f0fULL;
  x = (x | (x >> 4)) & 0x00ff00ff00ff00ffULL;
  x = (x | (x >> 8)) & 0x0000ffff0000ffffULL;
  x = (x | (x >> 16)) & 0x00000000ffffffffULL;
  return x;
}

std::uint64_t spread3(std::uint64_t x) {
  x &= 0x1fffffULL;
  x = (x | (x << 32)) & 0x1f00000000ffffULL;
  x = (x | (x << 16)) & 0x1f0000ff0000ffULL;
  x = (x | (x << 8)) & 0x100f00f00f00f00fULL;
  x = (x | (x << 4)) & 0x10c30c30c30c30c3ULL;
  x = (x | (x << 2)) & 0x1249249249249249ULL;
  return x;
}

std::uint64_t compact3(std::uint64_t x) {
  x &= 0x1249249249249249ULL;
  x = (x | (x >> 2)) & 0x10c30c30c30c30c3ULL;
  x = (x | (x >> 4)) & 0x100f00f00f00f00fULL;
  x = (x | (x >> 8)) & 0x1f0000ff0000ffULL;
  x = (x | (x >> 16)) & 0x1f00000000ffffULL;
  x = (x | (x >> 32)) & 0x1fffffULL;
  return x;
}

void require_same_dim(const DyadicSet& a, const DyadicSet& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dyadic sets of different dimension");
}

std::pair<DyadicSet, DyadicSet> co_refine(const DyadicSet& a, const DyadicSet& b) {
  require_same_dim(a, b);
  const int level = std::max(a.level(), b.level());
  return {a.refined(level), b.refined(level)};
}

}  // namespace

int max_level(int dim) {
  switch (dim) {
    case 1: return 24;
    case 2: return 12;
    case 3: return 8;
    default: throw std::invalid_argument("dimension must be 1, 2 or 3");
  }
}

void check_dim_level(int dim, int level) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (level < 0) throw std::invalid_argument("negative dyadic level");
  if (level > max_level(dim)) {
    throw ResourceLimitError("level " + std::to_string(level) + " exceeds the cap " +
                             std::to_string(max_level(dim)) + " for d=" + std::to_string(dim));
  }
}

MortonCode encode_cell(int dim, const CellIndex& idx) {
  switch (dim) {
    case 1: return idx[0];
    case 2: return spread2(idx[0]) | (spread2(idx[1]) << 1);
    default: return spread3(idx[0]) | (spread3(idx[1]) << 1) | (spread3(idx[2]) << 2);
  }
}

CellIndex decode_cell(int dim, MortonCode code) {
  CellIndex idx{};
  switch (dim) {
    case 1: idx[0] = static_cast<std::uint32_t>(code); break;
    case 2:
      idx[0] = static_cast<std::uint32_t>(compact2(code));
      idx[1] = static_cast<std::uint32_t>(compact2(code >> 1));
      break;
    default:
      idx[0] = static_cast<std::uint32_t>(compact3(code));
      idx[1] = static_cast<std::uint32_t>(compact3(code >> 1));
      idx[2] = static_cast<std::uint32_t>(compact3(code >> 2));
  }
  return idx;
}

double wrap_unit(double t) {
  double r = t - std::floor(t);
  if (r >= 1.0) r = 0.0;
  return r;
}

double circle_distance(double a, double b) {
  const double u = wrap_unit(a - b);
  return std::min(u, 1.0 - u);
}

TorusPoint::TorusPoint(int dim, std::span<const double> coords) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (coords.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("coordinate count does not match dimension");
  }
  for (int i = 0; i < dim; ++i) x_[static_cast<std::size_t>(i)] = wrap_unit(coords[static_cast<std::size_t>(i)]);
}

TorusPoint TorusPoint::of(std::initializer_list<double> coords) {
  return TorusPoint(static_cast<int>(coords.size()), std::span<const double>(coords.begin(), coords.size()));
}

double torus_distance(const TorusPoint& p, const TorusPoint& q) {
  if (p.dim() != q.dim()) throw std::invalid_argument("torus points of different dimension");
  double acc = 0.0;
  for (int i = 0; i < p.dim(); ++i) {
    const double t = circle_distance(p[i], q[i]);
    acc += t * t;
  }
  return std::sqrt(acc);
}

DyadicSet::DyadicSet(int dim, int level) : dim_(dim), level_(level) { check_dim_level(dim, level); }

DyadicSet DyadicSet::from_codes(int dim, int level, std::vector<MortonCode> codes) {
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  return from_sorted_codes(dim, level, std::move(codes));
}

DyadicSet DyadicSet::from_sorted_codes(int dim, int level, std::vector<MortonCode> codes) {
  DyadicSet s(dim, level);
  if (!codes.empty() && codes.back() >= s.grid_size()) {
    throw std::out_of_range("Morton code outside the level grid");
  }
  if (codes.size() > kMaxCells) throw ResourceLimitError("dyadic set exceeds the cell budget");
  s.codes_ = std::move(codes);
  return s;
}

DyadicSet DyadicSet::from_cells(int dim, int level, std::span<const CellIndex> cells) {
  DyadicSet probe(dim, level);
  const auto n = probe.cells_per_axis();
  std::vector<MortonCode> codes;
  codes.reserve(cells.size());
  for (const auto& c : cells) {
    for (int i = 0; i < dim; ++i) {
      if (c[static_cast<std::size_t>(i)] >= n) throw std::out_of_range("cell index outside the level grid");
    }
    codes.push_back(encode_cell(dim, c));
  }
  return from_codes(dim, level, std::move(codes));
}

DyadicSet DyadicSet::full(int dim, int level) {
  DyadicSet s(dim, level);
  if (s.grid_size() > kMaxCells) throw ResourceLimitError("full grid exceeds the cell budget");
  s.codes_.resize(s.grid_size());
  for (std::uint64_t i = 0; i < s.grid_size(); ++i) s.codes_[i] = i;
  return s;
}

double DyadicSet::cell_side() const noexcept { return std::ldexp(1.0, -level_); }

double DyadicSet::cell_volume() const noexcept { return std::ldexp(1.0, -level_ * dim_); }

bool DyadicSet::contains_code(MortonCode code) const {
  return std::binary_search(codes_.begin(), codes_.end(), code);
}

std::vector<CellIndex> DyadicSet::cells() const {
  std::vector<CellIndex> out;
  out.reserve(codes_.size());
  for (auto c : codes_) out.push_back(decode_cell(dim_, c));
  return out;
}

DyadicSet DyadicSet::refined(int level) const {
  if (level == level_) return *this;
  if (level < level_) throw std::invalid_argument("refined() needs a finer level");
  check_dim_level(dim_, level);
  const int shift = dim_ * (level - level_);
  const std::uint64_t children = std::uint64_t{1} << shift;
  if (codes_.size() * children > kMaxCells) throw ResourceLimitError("refinement exceeds the cell budget");
  std::vector<MortonCode> out;
  out.reserve(codes_.size() * children);
  for (auto c : codes_) {
    const MortonCode base = c << shift;
    for (std::uint64_t j = 0; j < children; ++j) out.push_back(base + j);
  }
  return from_sorted_codes(dim_, level, std::move(out));
}

DyadicSet DyadicSet::coarsened(int level) const {
  if (level == level_) return *this;
  if (level > level_) throw std::invalid_argument("coarsened() needs a coarser level");
  const int shift = dim_ * (level_ - level);
  std::vector<MortonCode> out;
  for (auto c : codes_) {
    const MortonCode p = c >> shift;
    if (out.empty() || out.back() != p) out.push_back(p);
  }
  return from_sorted_codes(dim_, level, std::move(out));
}

bool operator==(const DyadicSet& a, const DyadicSet& b) {
  if (a.dim() != b.dim()) return false;
  if (a.level() == b.level()) return a.codes_ == b.codes_;
  // A coarse set equals a fine one only if the fine one is a union of whole coarse cells.
  const DyadicSet& coarse = a.level() < b.level() ? a : b;
  const DyadicSet& fine = a.level() < b.level() ? b : a;
  const std::uint64_t per = std::uint64_t{1} << (a.dim() * (fine.level() - coarse.level()));
  if (fine.size() != coarse.size() * per) return false;
  return fine.coarsened(coarse.level()).codes_ == coarse.codes_;
}

double measure(const DyadicSet& s) { return static_cast<double>(s.size()) * s.cell_volume(); }

DyadicSet set_union(const DyadicSet& a, const DyadicSet& b) {
  auto [x, y] = co_refine(a, b);
  std::vector<MortonCode> out;
  out.reserve(x.size() + y.size());
  std::set_union(x.codes().begin(), x.codes().end(), y.codes().begin(), y.codes().end(), std::back_inserter(out));
  return DyadicSet::from_sorted_codes(x.dim(), x.level(), std::move(out));
}

DyadicSet set_intersection(const DyadicSet& a, const DyadicSet& b) {
  auto [x, y] = co_refine(a, b);
  std::vector<MortonCode> out;
  std::set_intersection(x.codes().begin(), x.codes().end(), y.codes().begin(), y.codes().end(),
                        std::back_inserter(out));
  return DyadicSet::from_sorted_codes(x.dim(), x.level(), std::move(out));
}

DyadicSet set_difference(const DyadicSet& a, const DyadicSet& b) {
  auto [x, y] = co_refine(a, b);
  std::vector<MortonCode> out;
  std::set_difference(x.codes().begin(), x.codes().end(), y.codes().begin(), y.codes().end(),
                      std::back_inserter(out));
  return DyadicSet::from_sorted_codes(x.dim(), x.level(), std::move(out));
}

bool is_subset(const DyadicSet& sub, const DyadicSet& super) {
  auto [x, y] = co_refine(sub, super);
  return std::includes(y.codes().begin(), y.codes().end(), x.codes().begin(), x.codes().end());
}

DyadicSet shift_cells(const DyadicSet& s, std::span<const std::int64_t> shift) {
  if (shift.size() != static_cast<std::size_t>(s.dim())) throw std::invalid_argument("shift dimension mismatch");
  const auto n = static_cast<std::int64_t>(s.cells_per_axis());
  std::vector<MortonCode> out;
  out.reserve(s.size());
  for (auto c : s.codes()) {
    CellIndex idx = decode_cell(s.dim(), c);
    for (int i = 0; i < s.dim(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      std::int64_t v = (static_cast<std::int64_t>(idx[k]) + shift[k]) % n;
      if (v < 0) v += n;
      idx[k] = static_cast<std::uint32_t>(v);
    }
    out.push_back(encode_cell(s.dim(), idx));
  }
  return DyadicSet::from_codes(s.dim(), s.level(), std::move(out));
}

TranslateResult translate(const DyadicSet& s, const TorusPoint& v) {
  if (v.dim() != s.dim()) throw std::invalid_argument("translation vector dimension mismatch");
  const double n = static_cast<double>(s.cells_per_axis());
  std::array<std::int64_t, kMaxDim> shift{};
  double err2 = 0.0;
  for (int i = 0; i < s.dim(); ++i) {
    const double cells = v[i] * n;
    const double snapped = std::nearbyint(cells);
    shift[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(snapped);
    const double e = circle_distance(v[i], snapped / n);
    err2 += e * e;
  }
  return {shift_cells(s, std::span<const std::int64_t>(shift.data(), static_cast<std::size_t>(s.dim()))),
          std::sqrt(err2)};
}

std::uint64_t count_positive_cells(const DyadicSet& s, int level) {
  if (level < 0) throw std::invalid_argument("negative level");
  if (level >= s.level()) {
    return static_cast<std::uint64_t>(s.size()) << (s.dim() * (level - s.level()));
  }
  const int shift = s.dim() * (s.level() - level);
  std::uint64_t count = 0;
  bool have = false;
  MortonCode last = 0;
  for (auto c : s.codes()) {
    const MortonCode p = c >> shift;
    if (!have || p != last) {
      ++count;
      last = p;
      have = true;
    }
  }
  return count;
}

void write_text(std::ostream& os, const DyadicSet& s) {
  os << s.dim() << ' ' << s.level() << ' ' << s.size() << '\n';
  for (auto c : s.codes()) {
    const CellIndex idx = decode_cell(s.dim(), c);
    for (int i = 0; i < s.dim(); ++i) {
      if (i) os << ' ';
      os << idx[static_cast<std::size_t>(i)];
    }
    os << '\n';
  }
}

DyadicSet read_text(std::istream& is) {
  int dim = 0;
  int level = 0;
  std::size_t count = 0;
  if (!(is >> dim >> level >> count)) throw std::runtime_error("malformed dyadic set header");
  DyadicSet probe(dim, level);
  std::vector<CellIndex> cells(count);
  for (std::size_t j = 0; j < count; ++j) {
    for (int i = 0; i < dim; ++i) {
      std::int64_t v = -1;
      if (!(is >> v) || v < 0 || static_cast<std::uint64_t>(v) >= probe.cells_per_axis()) {
        throw std::runtime_error("malformed dyadic set cell line " + std::to_string(j + 1));
      }
      cells[j][static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(v);
    }
  }
  return DyadicSet::from_cells(dim, level, cells);
}

std::string to_text(const DyadicSet& s) {
  std::ostringstream os;
  write_text(os, s);
  return os.str();
}

DyadicSet from_text(const std::string& text) {
  std::istringstream is(text);
  return read_text(is);
}

}  // namespace covlab
