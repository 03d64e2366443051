#pragma once

// Energies ∬ 1/h(|x-y|) of cell sets and cell-weighted measures on the torus.
//
// Two cells at offset c (in cells) of a level-l grid interact through
//   E(c) = h_l^{2d} ∫ k(h_l·|u|_T) Π_i (1 - |u_i - c_i|) du,   u ∈ c + (-1,1)^d,
// with h_l = 2^-l and k = 1/h. E depends only on the sorted absolute torus
// offset, so a set energy is Σ_δ C(δ) E(δ) with C the autocorrelation.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "covlab/autocorrelation.hpp"
#include "covlab/dyadic.hpp"
#include "covlab/gauge.hpp"

namespace covlab {

inline constexpr double kDefaultEnergyTol = 1e-3;

struct DiscreteMeasure {
  DyadicSet support;
  std::vector<double> weights;  ///< mass of each support cell, in code order

  double total_mass() const;
  /// Throws unless weights match the support and are nonnegative and finite.
  void validate() const;
  /// ℒ|_S scaled to the given total mass.
  static DiscreteMeasure uniform(const DyadicSet& s, double total_mass = 1.0);
};

/// Cache of E(c) for one (dimension, level, gauge, tol). Single owner; reuse
/// it across many sets at the same level.
class PairEnergyTable {
 public:
  PairEnergyTable(int dim, int level, GaugeFunction gauge, double tol = kDefaultEnergyTol);

  int dim() const noexcept { return dim_; }
  int level() const noexcept { return level_; }
  double tol() const noexcept { return tol_; }
  const GaugeFunction& gauge() const noexcept { return gauge_; }

  /// E for an integer cell offset (any representative mod 2^level).
  double operator()(const Offset& offset);
  double operator()(std::span<const std::int64_t> offset);

  /// False once any adaptive integral hit its depth limit.
  bool converged() const noexcept { return converged_; }
  std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  double compute(const std::array<std::int64_t, kMaxDim>& c);

  int dim_;
  int level_;
  GaugeFunction gauge_;
  double tol_;
  std::int64_t n_;
  std::int64_t stride_;
  std::vector<double> cache_;
  bool converged_ = true;
  std::size_t evaluations_ = 0;
};

/// ∬_{A×B} 1/h(|x-y|_T) dx dy; A and B must share dimension and level.
double cell_pair_energy(int dim, const DyadicCell& a, const DyadicCell& b, const GaugeFunction& h,
                        double tol = kDefaultEnergyTol);

double set_energy(const DyadicSet& f, PairEnergyTable& table);
double set_energy(const DyadicSet& f, const GaugeFunction& h, double tol = kDefaultEnergyTol);

/// Σ_ab w_a w_b E(b - a) / vol², i.e. the energy of Σ_a w_a ℒ|_{Q_a}/ℒ(Q_a).
double measure_energy(const DiscreteMeasure& mu, PairEnergyTable& table);
double measure_energy(const DiscreteMeasure& mu, const GaugeFunction& h, double tol = kDefaultEnergyTol);

/// ℒ(F)²/I_h(F); 0 when ℒ(F) = 0 or the energy diverges.
double g_value(const DyadicSet& f, PairEnergyTable& table);
double g_value(const DyadicSet& f, const GaugeFunction& h, double tol = kDefaultEnergyTol);

/// Σ_δ C(δ)·E(δ) over a precomputed autocorrelation.
double correlate_energy(const OffsetTable& corr, PairEnergyTable& table);

}  // namespace covlab
