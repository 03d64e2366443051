#pragma once

// Dyadic-cell model of subsets of the d-torus R^d / Z^d.
//
// A set is a finite union of half-open cells [0,2^-l)^d + 2^-l * index at a
// single level l. Cells are stored as Morton (Z-order) codes, so the children
// of a cell occupy a contiguous code range and the parent of a code is
// code >> d. Every operation below is exact on these representations.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace covlab {

inline constexpr int kMaxDim = 3;

using CellIndex = std::array<std::uint32_t, kMaxDim>;
using MortonCode = std::uint64_t;

/// Thrown when a level or cell count exceeds the configured budget.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest supported level per dimension (24 for d=1, 12 for d=2, 8 for d=3).
int max_level(int dim);
/// Upper bound on the number of cells any single set may hold.
inline constexpr std::uint64_t kMaxCells = std::uint64_t{1} << 25;

void check_dim_level(int dim, int level);

MortonCode encode_cell(int dim, const CellIndex& idx);
CellIndex decode_cell(int dim, MortonCode code);

struct DyadicCell {
  int level = 0;
  CellIndex index{};
};

/// A point of the torus; coordinates are reduced into [0,1).
class TorusPoint {
 public:
  TorusPoint() = default;
  TorusPoint(int dim, std::span<const double> coords);
  static TorusPoint of(std::initializer_list<double> coords);

  int dim() const noexcept { return dim_; }
  double operator[](int i) const { return x_[static_cast<std::size_t>(i)]; }
  const std::array<double, kMaxDim>& coords() const noexcept { return x_; }

 private:
  int dim_ = 1;
  std::array<double, kMaxDim> x_{};
};

/// Reduces t into [0,1).
double wrap_unit(double t);
/// Distance on the circle R/Z between a and b, in [0, 1/2].
double circle_distance(double a, double b);
/// Euclidean distance minimised over integer translates.
double torus_distance(const TorusPoint& p, const TorusPoint& q);

class DyadicSet {
 public:
  DyadicSet() = default;
  DyadicSet(int dim, int level);

  /// Takes arbitrary codes; sorts and removes duplicates.
  static DyadicSet from_codes(int dim, int level, std::vector<MortonCode> codes);
  /// Takes codes that are already strictly increasing.
  static DyadicSet from_sorted_codes(int dim, int level, std::vector<MortonCode> codes);
  static DyadicSet from_cells(int dim, int level, std::span<const CellIndex> cells);
  static DyadicSet full(int dim, int level);

  int dim() const noexcept { return dim_; }
  int level() const noexcept { return level_; }
  std::size_t size() const noexcept { return codes_.size(); }
  bool empty() const noexcept { return codes_.empty(); }
  const std::vector<MortonCode>& codes() const noexcept { return codes_; }
  std::uint64_t cells_per_axis() const noexcept { return std::uint64_t{1} << level_; }
  std::uint64_t grid_size() const noexcept { return std::uint64_t{1} << (level_ * dim_); }
  double cell_side() const noexcept;
  double cell_volume() const noexcept;
  bool is_full() const noexcept { return codes_.size() == grid_size(); }

  bool contains_code(MortonCode code) const;
  std::vector<CellIndex> cells() const;

  /// Same point set at a finer level.
  DyadicSet refined(int level) const;
  /// Cells of a coarser level that meet this set in positive measure.
  DyadicSet coarsened(int level) const;

  /// Point-set equality; operands at different levels are co-refined.
  friend bool operator==(const DyadicSet& a, const DyadicSet& b);

 private:
  int dim_ = 1;
  int level_ = 0;
  std::vector<MortonCode> codes_;
};

double measure(const DyadicSet& s);

DyadicSet set_union(const DyadicSet& a, const DyadicSet& b);
DyadicSet set_intersection(const DyadicSet& a, const DyadicSet& b);
DyadicSet set_difference(const DyadicSet& a, const DyadicSet& b);
bool is_subset(const DyadicSet& sub, const DyadicSet& super);

struct TranslateResult {
  DyadicSet set;
  /// Torus norm of the difference between the requested and applied shift.
  double snap_error = 0.0;
};

/// Exact shift by a whole number of cells per axis (mod 2^level).
DyadicSet shift_cells(const DyadicSet& s, std::span<const std::int64_t> shift);
/// Translation by v snapped to the nearest grid vector.
TranslateResult translate(const DyadicSet& s, const TorusPoint& v);

/// N*_l: number of level-l cells meeting s in positive measure.
std::uint64_t count_positive_cells(const DyadicSet& s, int level);

/// Text format: header "d l count" then one index vector per line.
void write_text(std::ostream& os, const DyadicSet& s);
DyadicSet read_text(std::istream& is);
std::string to_text(const DyadicSet& s);
DyadicSet from_text(const std::string& text);

}  // namespace covlab
