#pragma once

// Rasterizers for generator shapes and the constructed example sets.

#include <span>
#include <utility>
#include <vector>

#include "covlab/dyadic.hpp"

namespace covlab {

enum class RasterMode {
  inner,  ///< cells contained in the shape
  outer,  ///< cells meeting the shape in positive measure
};

DyadicSet rasterize_ball(const TorusPoint& center, double r, int level, RasterMode mode);

/// Axis-aligned box [corner, corner + sides) wrapped onto the torus.
DyadicSet rasterize_rectangle(const TorusPoint& corner, std::span<const double> sides, int level,
                              RasterMode mode);

// Code-emitting variants used when many shapes are merged into one set.
void append_ball_codes(std::vector<MortonCode>& out, const TorusPoint& center, double r, int level,
                       RasterMode mode);
/// Box with absolute bounds lo[i] < hi[i] (any real values; wrapped mod 1).
void append_box_codes(std::vector<MortonCode>& out, int dim, const std::array<double, kMaxDim>& lo,
                      const std::array<double, kMaxDim>& hi, int level, RasterMode mode);

/// Intervals [a,b) of a centrally-gapped Cantor construction on [0,1).
/// Stage k removes the open middle fraction gap_ratios[k] of every interval;
/// stages whose gaps would be shorter than min_gap are not applied.
std::vector<std::pair<double, double>> fat_cantor_intervals(std::span<const double> gap_ratios,
                                                            double min_gap);

/// d=1 fat Cantor set truncated at resolution 2^-level (inner raster of the
/// resolvable stages). Rejects schedules whose limiting measure is zero.
DyadicSet fat_cantor(std::span<const double> gap_ratios, int level);

/// prod (1 - g_k): the measure of the untruncated construction.
double fat_cantor_limit_measure(std::span<const double> gap_ratios);

/// Relative gaps of the Smith-Volterra-Cantor construction (2^{k-1} gaps of
/// length 4^-k at stage k); the limit measure is 1/2.
std::vector<double> smith_volterra_gaps(int stages);

/// Q1 ∪ F_{Q2}: a cube of side r1 together with a cube of side r2 whose 2^{nd}
/// subcubes are each replaced by the concentric subcube shrunk by rho.
struct TwoCubesSpec {
  int dim = 2;
  double r1 = 0.125;
  double r2 = 0.25;
  double rho = 0.25;
  int subdivisions = 2;
  int level = 10;
  std::vector<double> q1_corner;  ///< defaults to the origin
  std::vector<double> q2_corner;  ///< defaults to (1/2, 0, ...)
};

struct TwoCubesSet {
  DyadicSet set;
  DyadicSet q1;
  DyadicSet f_q2;
  DyadicSet q2_cube;  ///< outer raster of the whole cube Q2
};

TwoCubesSet example_two_cubes(const TwoCubesSpec& spec);

}  // namespace covlab
