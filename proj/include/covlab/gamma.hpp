#pragma once

// Minimal regular s-energy: inf I_s(μ) over probability measures μ ≪ ℒ
// carried by E, restricted to cell-weighted densities.

#include <cstddef>
#include <span>
#include <string>

#include "covlab/dyadic.hpp"
#include "covlab/energy.hpp"

namespace covlab {

struct GammaOptions {
  int max_iters = 20000;
  double rel_gap = 1e-4;        ///< converged once gap ≤ rel_gap · value
  double tol = kDefaultEnergyTol;
  std::size_t max_cells = std::size_t{1} << 14;
  std::size_t dense_limit = 2048;  ///< keep the full kernel matrix up to this many cells
};

struct GammaResult {
  double value = 0.0;  ///< measure_energy(minimizer); +inf when ℒ(E) = 0
  DiscreteMeasure minimizer;
  int iterations = 0;
  double duality_gap = 0.0;  ///< Frank-Wolfe gap at the minimizer, ≥ 0
  bool converged = true;
};

/// Away-step Frank-Wolfe with exact line search on the simplex of cell masses.
GammaResult gamma(const DyadicSet& e, double s, const GammaOptions& options = {});
GammaResult gamma(const DyadicSet& e, PairEnergyTable& table, const GammaOptions& options = {});

/// gamma(F).value - gamma(E).value.
double gamma_stability(const DyadicSet& e, const DyadicSet& f, double s, const GammaOptions& options = {});

struct GammaContentBound {
  double value = 0.0;      ///< 1 / max_n Γ_s(E_n)
  double max_gamma = 0.0;
  bool converged = true;   ///< every Γ in the chain converged
  bool nested = true;
  std::string caveat;
};

/// Lower bound on the s-content of ⋂ E_n from Γ_s of a decreasing chain.
GammaContentBound content_lower_from_gamma(std::span<const DyadicSet> chain, double s,
                                           const GammaOptions& options = {});

}  // namespace covlab
