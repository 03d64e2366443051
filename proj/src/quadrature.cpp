#include "covlab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace covlab {

namespace {

constexpr int kMaxOrder = 64;

GaussRule build_rule(int n) {
  // Newton on P_n from the Chebyshev-like initial guess; nodes symmetric.
  GaussRule rule;
  rule.x.resize(static_cast<std::size_t>(n));
  rule.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.x[lo] = 0.5 * (1.0 - z);
    rule.x[hi] = 0.5 * (1.0 + z);
    rule.w[lo] = 0.5 * w;
    rule.w[hi] = 0.5 * w;
  }
  return rule;
}

struct RuleTable {
  std::array<GaussRule, kMaxOrder + 1> rules;
  RuleTable() {
    for (int n = 1; n <= kMaxOrder; ++n) rules[static_cast<std::size_t>(n)] = build_rule(n);
  }
};

double tensor_rule(int dim, const BoxPoint& lo, const BoxPoint& hi, const GaussRule& rule,
                   const std::function<double(const BoxPoint&)>& f) {
  const std::size_t n = rule.x.size();
  double vol = 1.0;
  for (int i = 0; i < dim; ++i) vol *= hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)];
  std::array<std::size_t, kMaxDim> pos{};
  double sum = 0.0;
  while (true) {
    BoxPoint p{};
    double w = 1.0;
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      p[k] = lo[k] + (hi[k] - lo[k]) * rule.x[pos[k]];
      w *= rule.w[pos[k]];
    }
    sum += w * f(p);
    int i = 0;
    for (; i < dim; ++i) {
      if (++pos[static_cast<std::size_t>(i)] < n) break;
      pos[static_cast<std::size_t>(i)] = 0;
    }
    if (i == dim) break;
  }
  return sum * vol;
}

void adapt(int dim, const BoxPoint& lo, const BoxPoint& hi, const std::function<double(const BoxPoint&)>& f,
           double rel_tol, int depth, BoxIntegral& acc) {
  const double high = tensor_rule(dim, lo, hi, gauss_legendre(6), f);
  const double low = tensor_rule(dim, lo, hi, gauss_legendre(4), f);
  const double err = std::abs(high - low);
  if (err <= rel_tol * std::abs(high) || depth == 0 || !std::isfinite(high)) {
    if (depth == 0 && err > rel_tol * std::abs(high)) acc.converged = false;
    acc.value += high;
    acc.error += err;
    return;
  }
  const int children = 1 << dim;
  for (int c = 0; c < children; ++c) {
    BoxPoint clo = lo;
    BoxPoint chi = hi;
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double mid = 0.5 * (lo[k] + hi[k]);
      if ((c >> i) & 1) {
        clo[k] = mid;
      } else {
        chi[k] = mid;
      }
    }
    adapt(dim, clo, chi, f, rel_tol, depth - 1, acc);
  }
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static const RuleTable table;
  if (order < 1 || order > kMaxOrder) throw std::invalid_argument("Gauss-Legendre order out of range");
  return table.rules[static_cast<std::size_t>(order)];
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int order, int panels) {
  const GaussRule& rule = gauss_legendre(order);
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    double s = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * f(lo + width * rule.x[i]);
    sum += s * width;
  }
  return sum;
}

BoxIntegral integrate_box(int dim, const BoxPoint& lo, const BoxPoint& hi,
                          const std::function<double(const BoxPoint&)>& f, double rel_tol, int max_depth) {
  BoxIntegral acc;
  adapt(dim, lo, hi, f, rel_tol, max_depth, acc);
  return acc;
}

}  // namespace covlab
