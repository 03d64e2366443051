#pragma once

// Dyadic net content (upper bound for the Hausdorff content), the
// near-diagonal thinning of a set, and certified lower bounds for
// G_h(F) = sup { g_h(F') : F' ⊆ F, ℒ(F') > 0 }.

#include <optional>
#include <string>
#include <vector>

#include "covlab/dyadic.hpp"
#include "covlab/energy.hpp"
#include "covlab/gauge.hpp"

namespace covlab {

struct ContentCover {
  double value = 0.0;
  std::vector<DyadicCell> cubes;  ///< optimal cover, coarsest cube kept on ties
};

/// min Σ h(√d 2^-k) over covers of F by dyadic cubes of mixed levels.
double hausdorff_content_upper(const DyadicSet& f, const GaugeFunction& h);
ContentCover optimal_dyadic_cover(const DyadicSet& f, const GaugeFunction& h);

/// Smallest integer l with (1 + 2√d/l)^s < 3/2.
int near_separation(int dim, double s);

struct LebSplit {
  DyadicSet set;
  double requested_p = 1.0;
  double achieved_p = 1.0;  ///< ℒ(F₁)/ℒ(F)
  int grid_level = 0;       ///< level n of the cube grid Q_n
  double near_ratio = 0.0;  ///< near-diagonal energy at level n divided by I_s(F)
  bool criterion_met = true;
};

/// Thinning F₁ ⊆ F with ℒ(F₁) ≈ p ℒ(F) and I_s(F₁) ≤ 2p² I_s(F): picks the
/// coarsest grid level n whose near-diagonal energy is below p² I_s(F)/2,
/// then keeps a p-fraction of F inside every level-n cube, spread evenly in
/// Z-order. The output level may be finer than F's so each kept fraction is
/// resolvable.
/// max_extra_levels bounds how far below F's level the cube grid may go.
LebSplit lem_leb_split(const DyadicSet& f, double p, double s, double tol = kDefaultEnergyTol,
                       int max_extra_levels = 24);

struct GLowerOptions {
  bool localize = true;                    ///< candidates F ∩ Q over dyadic cubes Q
  bool thin = true;                        ///< lem_leb_split thinnings of the best candidates
  std::vector<double> thin_fractions{0.5, 0.25, 0.125};
  int thin_top = 3;
  std::size_t thin_max_cells = 4096;
  int thin_max_extra_levels = 2;
  double tol = kDefaultEnergyTol;
};

struct GLower {
  double value = 0.0;
  DyadicSet witness;
  std::string witness_kind;  ///< "self", "cube", "thinned" or "empty"
  std::size_t candidates = 0;
};

/// max g_h over the candidate family; a lower bound on G_h(F) by construction.
GLower g_lower(const DyadicSet& f, const GaugeFunction& h, const GLowerOptions& options = {});

}  // namespace covlab
