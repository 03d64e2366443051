#include "covlab/displacement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "covlab/sampling.hpp"

namespace covlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Signed representative of a - b in [-1/2, 1/2).
double circle_diff(double a, double b) {
  const double d = a - b;
  return d - std::nearbyint(d);
}

}  // namespace

DisplacementFamily DisplacementFamily::translation(int dim) {
  check_dim_level(dim, 0);
  DisplacementFamily f;
  f.dim_ = dim;
  return f;
}

DisplacementFamily DisplacementFamily::nonlinear(int dim, double eps, int frequency) {
  check_dim_level(dim, 0);
  if (frequency < 1) throw std::invalid_argument("nonlinear displacement needs frequency >= 1");
  const double a = kTwoPi * frequency * eps;
  if (!(eps >= 0.0) || !(a < 0.5)) throw std::invalid_argument("nonlinear displacement needs 0 <= 2*pi*k*eps < 1/2");
  DisplacementFamily f;
  f.kind_ = Kind::nonlinear;
  f.dim_ = dim;
  f.eps_ = eps;
  f.k_ = frequency;
  f.bound_ = (1.0 + a) / (1.0 - a);
  // Grid check of the derivative bound, both arguments.
  constexpr int kGrid = 64;
  for (int p = 0; p < kGrid; ++p) {
    for (int q = 0; q < kGrid; ++q) {
      const double x = (p + 0.5) / kGrid;
      const double y = (q + 0.5) / kGrid;
      for (double g : {f.dy(x, y), f.dx(x, y)}) {
        if (!(g > 0.0) || g > f.bound_ || 1.0 / g > f.bound_) {
          throw std::logic_error("nonlinear displacement violates its derivative bound");
        }
      }
    }
  }
  return f;
}

std::string DisplacementFamily::describe() const {
  if (kind_ == Kind::translation) return "translation";
  std::ostringstream os;
  os << "nonlinear(eps=" << eps_ << ", k=" << k_ << ")";
  return os.str();
}

double DisplacementFamily::component(double x, double y) const {
  if (kind_ == Kind::translation) return x + y;
  return x + y + eps_ * std::sin(kTwoPi * k_ * x) * std::sin(kTwoPi * k_ * y);
}

double DisplacementFamily::dy(double x, double y) const {
  if (kind_ == Kind::translation) return 1.0;
  return 1.0 + eps_ * kTwoPi * k_ * std::sin(kTwoPi * k_ * x) * std::cos(kTwoPi * k_ * y);
}

double DisplacementFamily::dx(double x, double y) const {
  if (kind_ == Kind::translation) return 1.0;
  return 1.0 + eps_ * kTwoPi * k_ * std::cos(kTwoPi * k_ * x) * std::sin(kTwoPi * k_ * y);
}

TorusPoint DisplacementFamily::apply(const TorusPoint& x, const std::array<double, kMaxDim>& y) const {
  std::array<double, kMaxDim> z{};
  for (int i = 0; i < dim_; ++i) z[static_cast<std::size_t>(i)] = component(x[i], y[static_cast<std::size_t>(i)]);
  return TorusPoint(dim_, std::span<const double>(z.data(), static_cast<std::size_t>(dim_)));
}

Box DisplacementFamily::image(const TorusPoint& x, const Box& b) const {
  Box out{};
  for (int i = 0; i < dim_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[0][k] = component(x[i], b[0][k]);
    // Unwrapped: f_i(x, y + 1) = f_i(x, y) + 1, so the width is preserved exactly.
    out[1][k] = component(x[i], b[1][k]);
  }
  return out;
}

double DisplacementFamily::jacobian(const TorusPoint& x, const std::array<double, kMaxDim>& y) const {
  double j = 1.0;
  for (int i = 0; i < dim_; ++i) j *= dy(x[i], y[static_cast<std::size_t>(i)]);
  return j;
}

bool DisplacementFamily::solve_center(double z, double y, double guess, double& out) const {
  if (kind_ == Kind::translation) {
    out = z - y;
    return true;
  }
  // x ↦ z - y - ε sin(2πkx) sin(2πky) contracts with factor ≤ 2πkε < 1/2.
  double x = guess;
  for (int it = 0; it < 200; ++it) {
    const double next = z - y - eps_ * std::sin(kTwoPi * k_ * x) * std::sin(kTwoPi * k_ * y);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(next))) {
      out = next;
      return true;
    }
    x = next;
  }
  out = x;
  return false;
}

InverseFamilyReport verify_inverse_family(const DisplacementFamily& disp, std::size_t samples, std::uint64_t seed) {
  InverseFamilyReport rep;
  rep.samples = samples;
  rep.bound = disp.bound() * disp.bound();
  Rng rng(seed);
  constexpr double kStep = 1e-6;
  for (std::size_t s = 0; s < samples; ++s) {
    for (int i = 0; i < disp.dim(); ++i) {
      const double x = rng.uniform();
      const double y = rng.uniform();
      const double z = disp.component(x, y);
      double xh = 0.0;
      if (!disp.solve_center(z, y, z - y, xh)) ++rep.failures;
      rep.max_error = std::max(rep.max_error, std::abs(circle_diff(xh, x)));
      // Separable, so the inverse family's Jacobians are diagonal; these are the entries.
      double yp = 0.0;
      double ym = 0.0;
      double zp = 0.0;
      double zm = 0.0;
      bool ok = disp.solve_center(z, y + kStep, xh, yp);
      ok = disp.solve_center(z, y - kStep, xh, ym) && ok;
      ok = disp.solve_center(z + kStep, y, xh, zp) && ok;
      ok = disp.solve_center(z - kStep, y, xh, zm) && ok;
      if (!ok) ++rep.failures;
      const double d_y = std::abs(yp - ym) / (2 * kStep);
      const double d_z = std::abs(zp - zm) / (2 * kStep);
      rep.max_inverse_derivative = std::max({rep.max_inverse_derivative, d_y, d_z});
    }
  }
  rep.within_bound = rep.max_inverse_derivative <= rep.bound + 1e-6;
  return rep;
}

}  // namespace covlab
