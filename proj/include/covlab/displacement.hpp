#pragma once

// Displacement families f(x, y) placing a generator y ∈ A at a center x.
//
// translation: f(x, y) = x + y.
// nonlinear:   f_i(x, y) = x_i + y_i + ε sin(2πk x_i) sin(2πk y_i).
// Both are separable and strictly increasing in each y_i and x_i, so the
// image of a box under f(x, ·) is the box spanned by its corner images.

#include <array>
#include <cstdint>
#include <string>

#include "covlab/dyadic.hpp"

namespace covlab {

using Box = std::array<std::array<double, kMaxDim>, 2>;  ///< {lo, hi}, unwrapped coordinates

class DisplacementFamily {
 public:
  enum class Kind { translation, nonlinear };

  static DisplacementFamily translation(int dim);
  /// Requires 0 ≤ 2πkε < 1/2; checks the derivative bound on a sample grid.
  static DisplacementFamily nonlinear(int dim, double eps, int frequency);

  Kind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  double eps() const noexcept { return eps_; }
  int frequency() const noexcept { return k_; }
  /// (1 + 2πkε)/(1 - 2πkε); bounds ‖D f‖ and ‖(D f)^-1‖ in either argument.
  double bound() const noexcept { return bound_; }
  std::string describe() const;

  /// Component i of f, without wrapping.
  double component(double x, double y) const;
  /// ∂f_i/∂y_i and ∂f_i/∂x_i.
  double dy(double x, double y) const;
  double dx(double x, double y) const;

  TorusPoint apply(const TorusPoint& x, const std::array<double, kMaxDim>& y) const;
  Box image(const TorusPoint& x, const Box& b) const;
  /// det D_y f(x, y).
  double jacobian(const TorusPoint& x, const std::array<double, kMaxDim>& y) const;

  /// Solves f_i(x̂, y) = z for x̂ near `guess` (x̂ = z - y for translations).
  /// Returns false if the fixed-point iteration fails to settle.
  bool solve_center(double z, double y, double guess, double& out) const;

 private:
  Kind kind_ = Kind::translation;
  int dim_ = 1;
  double eps_ = 0.0;
  int k_ = 0;
  double bound_ = 1.0;
};

struct InverseFamilyReport {
  std::size_t samples = 0;
  double max_error = 0.0;         ///< max torus distance |x̂ - x|
  std::size_t failures = 0;       ///< fixed-point solves that did not converge
  double max_inverse_derivative = 0.0;  ///< finite-difference norm of y ↦ X_z(y) and z ↦ X_z(y)
  double bound = 1.0;             ///< C_u²
  bool within_bound = true;
};

/// Recovers x from z = f(x, y) on random (x, y) and measures the inverse family.
InverseFamilyReport verify_inverse_family(const DisplacementFamily& disp, std::size_t samples, std::uint64_t seed);

}  // namespace covlab
