#pragma once

#include <array>
#include <functional>
#include <vector>

#include "covlab/dyadic.hpp"

namespace covlab {

/// Gauss-Legendre rule mapped to [0,1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Rules of order 1..64, built once.
const GaussRule& gauss_legendre(int order);

/// ∫_a^b f by the composite rule of the given order over `panels` equal panels.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int order, int panels = 1);

using BoxPoint = std::array<double, kMaxDim>;

struct BoxIntegral {
  double value = 0.0;
  double error = 0.0;  ///< sum of |high - low| over accepted leaves
  bool converged = true;
};

/// Adaptive tensor Gauss-Legendre on [lo, hi] ⊂ R^dim: a box is accepted when
/// the order-6 and order-4 estimates agree to rel_tol of the order-6 value,
/// otherwise it is bisected along every axis. Intended for integrands that are
/// smooth and positive on the box.
BoxIntegral integrate_box(int dim, const BoxPoint& lo, const BoxPoint& hi,
                          const std::function<double(const BoxPoint&)>& f, double rel_tol, int max_depth = 10);

}  // namespace covlab
