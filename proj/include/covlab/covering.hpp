#pragma once

// Random covering sets: generators A_n placed at random centers x_n through a
// displacement family, their finite block unions, truncated limsup chains and
// the dimension read from them.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "covlab/displacement.hpp"
#include "covlab/dyadic.hpp"
#include "covlab/sampling.hpp"

namespace covlab {

/// Generators A_n, n = 1..n_max, all positioned around `base` (the chart
/// point y0). Size laws are decreasing in n.
struct GeneratorSchedule {
  enum class Family { ball, rectangle, fat_cantor_copy, custom };

  Family family = Family::ball;
  int dim = 1;
  std::uint64_t n_max = 100000;
  std::array<double, kMaxDim> base{};
  /// ball radius, or fat Cantor copy side length: scale * n^-exponent.
  double scale = 1.0;
  double exponent = 1.0;
  /// Radius of the compact Δ ∋ every A_n: ball radii and Cantor sides are capped here.
  double max_radius = 0.15;
  /// rectangle side i: side_scale[i] * n^-side_exponent[i].
  std::array<double, kMaxDim> side_scale{1.0, 1.0, 1.0};
  std::array<double, kMaxDim> side_exponent{1.0, 1.0, 1.0};
  std::vector<double> cantor_gaps;
  /// custom: A_n as cells in chart coordinates; diameters come from the set.
  std::function<DyadicSet(std::uint64_t)> custom;

  static GeneratorSchedule balls(int dim, double scale, double exponent, std::uint64_t n_max);

  double radius(std::uint64_t n) const;
  double side(std::uint64_t n, int axis) const;
  double diameter(std::uint64_t n) const;
  /// Lebesgue measure of A_n (exact for every built-in family).
  double measure(std::uint64_t n) const;
  std::string describe() const;
  /// Throws if sizes are not positive or, for nonlinear families, f(x, A_1)
  /// could leave the chart.
  void validate(const DisplacementFamily& disp) const;
};

/// Appends the level-l cells meeting f(x, A_n) in positive measure.
void append_generator_image(std::vector<MortonCode>& out, const GeneratorSchedule& sched,
                            const DisplacementFamily& disp, const TorusPoint& x, std::uint64_t n, int level);

/// Outer raster of ∪_{n1 < k ≤ n2} f(x_k, A_k); centers[k-1] is x_k.
DyadicSet stage_union(std::span<const TorusPoint> centers, const GeneratorSchedule& sched,
                      const DisplacementFamily& disp, std::uint64_t n1, std::uint64_t n2, int level);

/// Blocks (N_{j-1}, N_j] with N_0 = 0, N_j = ceil(N_1 ρ^{j-1}) ≤ n_max, and a
/// counting level per block near the smallest generator diameter in it.
struct BlockPlan {
  std::vector<std::uint64_t> boundaries;  ///< N_0 = 0 < N_1 < ... < N_J
  std::vector<int> levels;                ///< one per block, nondecreasing
  std::vector<bool> capped;               ///< level hit level_cap
  std::size_t blocks() const { return levels.size(); }
};

/// Which generator of a block sets its counting scale 2^-ℓ_j ≈ diam.
enum class BlockScale { smallest, largest };

BlockPlan make_block_plan(const GeneratorSchedule& sched, std::uint64_t first, double ratio, int level_cap,
                          BlockScale scale = BlockScale::smallest);
/// Leading blocks whose level was not capped.
BlockPlan uncapped_prefix(const BlockPlan& plan);

struct LimsupChain {
  std::vector<DyadicSet> stages;  ///< stage_union of each block at its level
  std::vector<DyadicSet> chain;   ///< E_j = ⋂_{i ≤ j} stages_i, nested
  std::vector<double> survival;   ///< ℒ(E_j)
  int empty_at = 0;               ///< 1-based block where E_j first became empty, 0 if never
};

LimsupChain truncated_limsup(std::span<const TorusPoint> centers, const GeneratorSchedule& sched,
                             const DisplacementFamily& disp, const BlockPlan& plan);

struct DimensionEstimate {
  double value = 0.0;       ///< least-squares slope clamped to [0, d]
  double raw_slope = 0.0;
  std::vector<std::pair<double, double>> scale_points;  ///< (ℓ_j log 2, log N_j)
  double r_squared = 0.0;
  std::vector<double> local_slopes;     ///< between consecutive scale points
  std::vector<std::uint64_t> blocks;    ///< block boundaries used, if known
  std::size_t fitted = 0;               ///< trailing scale points in the fit
};

/// Slope of log N*_{ℓ_j}(E_j) against ℓ_j log 2. Sets with N = 0 are skipped.
/// fit_last > 0 fits only the last fit_last scale points (all are still
/// reported); throws if fewer than 3 points enter the fit.
DimensionEstimate box_dimension_estimate(std::span<const DyadicSet> sets, std::span<const int> levels,
                                         std::span<const std::uint64_t> blocks = {}, std::size_t fit_last = 0);

struct SaturationReport {
  std::uint64_t target = 0;        ///< N*_ℓ(F)
  std::uint64_t reached = 0;       ///< N*_ℓ(F ∩ ∪_{i=n}^{n_max} f(x_i, A_i))
  double ratio = 0.0;              ///< reached / target
  std::uint64_t first_index = 0;   ///< first i at which the ratio reached 1, 0 if never
};

SaturationReport packing_saturation_check(std::span<const TorusPoint> centers, const GeneratorSchedule& sched,
                                          const DisplacementFamily& disp, const DyadicSet& f, int level,
                                          std::uint64_t n_start);

struct DensityReport {
  double delta = 0.0;       ///< radius about y0 containing E
  double fraction = 0.0;    ///< share of x ∈ F with ℒ(F ∩ W_x(E)) ≥ (1-ε) ℒ(W_x(E))
  double std_error = 0.0;
  bool meets = false;       ///< fraction ≥ 1 - ε within two standard errors
  bool vacuous = false;     ///< ℒ(E) = 0
  std::size_t samples = 0;
};

/// Monte Carlo over x ∈ F; each ℒ(F ∩ W_x(E))/ℒ(W_x(E)) is estimated by
/// pulling back to E with the Jacobian weight of y ↦ f(x, y).
DensityReport density_interaction_check(const DyadicSet& f, const DisplacementFamily& disp, const DyadicSet& e,
                                        const TorusPoint& y0, double eps, std::size_t samples,
                                        std::size_t inner_samples, std::uint64_t seed);

/// The same check with E = inner raster of B(y0, δ) for each δ of the ladder.
std::vector<DensityReport> density_interaction_ladder(const DyadicSet& f, const DisplacementFamily& disp,
                                                      const TorusPoint& y0, std::span<const double> deltas,
                                                      double eps, std::size_t samples, std::size_t inner_samples,
                                                      std::uint64_t seed);

}  // namespace covlab
