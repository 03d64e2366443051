#include "covlab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "covlab/quadrature.hpp"

namespace covlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDuffyOrder = 12;

using IOffset = std::array<std::int64_t, kMaxDim>;

std::int64_t abs_reduced(std::int64_t d, std::int64_t n) {
  d %= n;
  if (d < 0) d += n;
  return std::min(d, n - d);
}

// ∫ over a piece [-1,0] or [0,1] per axis that has a corner at the origin.
// v_i = |u_i| and the tent weight is alpha_i + beta_i v_i. The cube [0,1]^d is
// split into d pyramids by the largest coordinate m; with v_m = ρ and
// v_i = ρ t_i the radial integral is (hn)^{-(d+j)} M_j(hn), n = |(t,1)|.
double singular_piece(int dim, double h, const GaugeFunction& g, const std::array<double, kMaxDim>& alpha,
                      const std::array<double, kMaxDim>& beta) {
  const GaussRule& rule = gauss_legendre(kDuffyOrder);
  const std::size_t q = rule.x.size();
  const int free_axes = dim - 1;
  std::size_t nodes = 1;
  for (int i = 0; i < free_axes; ++i) nodes *= q;
  double total = 0.0;
  for (int m = 0; m < dim; ++m) {
    for (std::size_t node = 0; node < nodes; ++node) {
      std::array<double, kMaxDim> tau{};
      double weight = 1.0;
      double norm2 = 1.0;
      std::size_t rest = node;
      for (int i = 0; i < dim; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (i == m) {
          tau[k] = 1.0;
          continue;
        }
        const std::size_t p = rest % q;
        rest /= q;
        tau[k] = rule.x[p];
        weight *= rule.w[p];
        norm2 += tau[k] * tau[k];
      }
      // Coefficients of Π_i (alpha_i + beta_i tau_i ρ) in powers of ρ.
      std::array<double, kMaxDim + 1> poly{1.0, 0.0, 0.0, 0.0};
      for (int i = 0; i < dim; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double a = alpha[k];
        const double b = beta[k] * tau[k];
        for (int j = i + 1; j >= 0; --j) {
          const auto jj = static_cast<std::size_t>(j);
          poly[jj] = poly[jj] * a + (j > 0 ? poly[jj - 1] * b : 0.0);
        }
      }
      const double hn = h * std::sqrt(norm2);
      double radial = 0.0;
      for (int j = 0; j <= dim; ++j) {
        const double c = poly[static_cast<std::size_t>(j)];
        if (c == 0.0) continue;
        const double mom = g.radial_moment(dim, j, hn);
        if (!std::isfinite(mom)) return kInf;
        radial += c * mom / std::pow(hn, dim + j);
      }
      total += weight * radial;
    }
  }
  return total;
}

double offset_energy(int dim, int level, const GaugeFunction& g, double tol, IOffset c, bool& converged) {
  if (level < 2) {
    // Below four cells per axis the origin is not the only zero of |u|_T on
    // the pieces; sum the level-2 subcell pairs instead.
    const std::int64_t k = std::int64_t{1} << (2 - level);
    const std::int64_t width = 2 * k - 1;
    std::int64_t terms = 1;
    for (int i = 0; i < dim; ++i) terms *= width;
    double sum = 0.0;
    for (std::int64_t t = 0; t < terms; ++t) {
      std::int64_t rest = t;
      IOffset sub{};
      double mult = 1.0;
      for (int i = 0; i < dim; ++i) {
        const auto ki = static_cast<std::size_t>(i);
        const std::int64_t d = rest % width - (k - 1);
        rest /= width;
        sub[ki] = c[ki] * k + d;
        mult *= static_cast<double>(k - std::abs(d));
      }
      const double e = offset_energy(dim, 2, g, tol, sub, converged);
      if (!std::isfinite(e)) return kInf;
      sum += mult * e;
    }
    return sum;
  }
  const std::int64_t n = std::int64_t{1} << level;
  const double h = std::ldexp(1.0, -level);
  const double vol2 = std::pow(h, 2 * dim);
  for (int i = 0; i < dim; ++i) c[static_cast<std::size_t>(i)] = abs_reduced(c[static_cast<std::size_t>(i)], n);

  bool touching = true;
  bool kink = false;
  double norm2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    const auto ci = c[static_cast<std::size_t>(i)];
    touching = touching && ci <= 1;
    kink = kink || ci >= n / 2 - 1;
    norm2 += static_cast<double>(ci * ci);
  }
  if (touching && !g.integrable(dim)) return kInf;

  // Midpoint rule once the tent-averaged curvature of the kernel is below tol.
  const double sigma = g.decay_exponent(dim);
  if (!kink && norm2 * 3.0 * tol >= (sigma + 2.0) * (sigma + 2.0)) {
    const double r = h * std::sqrt(norm2);
    const double slack = h * std::sqrt(static_cast<double>(dim));
    const bool straddles_cutoff = std::isfinite(g.cutoff()) && std::abs(r - g.cutoff()) <= slack;
    if (!straddles_cutoff) return vol2 * g.kernel(r);
  }

  double total = 0.0;
  const int pieces = 1 << dim;
  for (int mask = 0; mask < pieces; ++mask) {
    BoxPoint lo{};
    BoxPoint hi{};
    bool singular = true;
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double ci = static_cast<double>(c[k]);
      lo[k] = ((mask >> i) & 1) ? ci : ci - 1.0;
      hi[k] = lo[k] + 1.0;
      singular = singular && (lo[k] == 0.0 || hi[k] == 0.0);
    }
    if (singular) {
      std::array<double, kMaxDim> alpha{};
      std::array<double, kMaxDim> beta{};
      for (int i = 0; i < dim; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double ci = static_cast<double>(c[k]);
        const double sign = lo[k] == 0.0 ? 1.0 : -1.0;
        alpha[k] = 1.0 - ci;
        beta[k] = (1.0 - std::abs(sign - ci)) - alpha[k];
      }
      const double v = singular_piece(dim, h, g, alpha, beta);
      if (!std::isfinite(v)) return kInf;
      total += v;
      continue;
    }
    auto integrand = [&](const BoxPoint& u) {
      double d2 = 0.0;
      double w = 1.0;
      for (int i = 0; i < dim; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double x = h * u[k];
        const double t = x - std::nearbyint(x);
        d2 += t * t;
        w *= 1.0 - std::abs(u[k] - static_cast<double>(c[k]));
      }
      return w * g.kernel(std::sqrt(d2));
    };
    const BoxIntegral r = integrate_box(dim, lo, hi, integrand, 0.25 * tol, 10);
    converged = converged && r.converged;
    total += r.value;
  }
  return vol2 * total;
}

}  // namespace

double DiscreteMeasure::total_mass() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

void DiscreteMeasure::validate() const {
  if (weights.size() != support.size()) throw std::invalid_argument("measure weights do not match its support");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("measure weights must be finite and nonnegative");
  }
}

DiscreteMeasure DiscreteMeasure::uniform(const DyadicSet& s, double total_mass) {
  DiscreteMeasure mu;
  mu.support = s;
  if (!s.empty()) mu.weights.assign(s.size(), total_mass / static_cast<double>(s.size()));
  return mu;
}

PairEnergyTable::PairEnergyTable(int dim, int level, GaugeFunction gauge, double tol)
    : dim_(dim), level_(level), gauge_(std::move(gauge)), tol_(tol) {
  check_dim_level(dim, level);
  if (!(tol > 0.0)) throw std::invalid_argument("energy tolerance must be positive");
  n_ = std::int64_t{1} << level;
  stride_ = n_ / 2 + 1;
  std::uint64_t size = 1;
  for (int i = 0; i < dim; ++i) size *= static_cast<std::uint64_t>(stride_);
  if (size > kMaxCells) throw ResourceLimitError("pair energy table exceeds the cell budget");
  cache_.assign(static_cast<std::size_t>(size), std::numeric_limits<double>::quiet_NaN());
}

double PairEnergyTable::operator()(std::span<const std::int64_t> offset) {
  if (offset.size() != static_cast<std::size_t>(dim_)) throw std::invalid_argument("offset dimension mismatch");
  IOffset c{};
  for (int i = 0; i < dim_; ++i) c[static_cast<std::size_t>(i)] = abs_reduced(offset[static_cast<std::size_t>(i)], n_);
  std::sort(c.begin(), c.begin() + dim_);
  std::size_t idx = 0;
  for (int i = dim_ - 1; i >= 0; --i) idx = idx * static_cast<std::size_t>(stride_) + static_cast<std::size_t>(c[static_cast<std::size_t>(i)]);
  double& slot = cache_[idx];
  if (std::isnan(slot)) slot = compute(c);
  return slot;
}

double PairEnergyTable::operator()(const Offset& offset) {
  std::array<std::int64_t, kMaxDim> c{};
  for (int i = 0; i < dim_; ++i) c[static_cast<std::size_t>(i)] = offset[static_cast<std::size_t>(i)];
  return (*this)(std::span<const std::int64_t>(c.data(), static_cast<std::size_t>(dim_)));
}

double PairEnergyTable::compute(const std::array<std::int64_t, kMaxDim>& c) {
  ++evaluations_;
  return offset_energy(dim_, level_, gauge_, tol_, c, converged_);
}

double cell_pair_energy(int dim, const DyadicCell& a, const DyadicCell& b, const GaugeFunction& h, double tol) {
  if (a.level != b.level) throw std::invalid_argument("cells must share a level");
  check_dim_level(dim, a.level);
  const std::uint64_t n = std::uint64_t{1} << a.level;
  IOffset c{};
  for (int i = 0; i < dim; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (a.index[k] >= n || b.index[k] >= n) throw std::invalid_argument("cell index out of range");
    c[k] = static_cast<std::int64_t>(b.index[k]) - static_cast<std::int64_t>(a.index[k]);
  }
  bool converged = true;
  return offset_energy(dim, a.level, h, tol, c, converged);
}

double correlate_energy(const OffsetTable& corr, PairEnergyTable& table) {
  if (corr.dim != table.dim() || corr.level != table.level()) throw std::invalid_argument("energy table does not match the set grid");
  double sum = 0.0;
  for (std::size_t i = 0; i < corr.values.size(); ++i) {
    const double e = table(corr.offsets[i]);
    if (!std::isfinite(e)) return kInf;
    sum += corr.values[i] * e;
  }
  return sum;
}

double set_energy(const DyadicSet& f, PairEnergyTable& table) {
  if (f.empty()) return 0.0;
  return correlate_energy(autocorrelation(f), table);
}

double set_energy(const DyadicSet& f, const GaugeFunction& h, double tol) {
  if (f.empty()) return 0.0;
  PairEnergyTable table(f.dim(), f.level(), h, tol);
  return set_energy(f, table);
}

double measure_energy(const DiscreteMeasure& mu, PairEnergyTable& table) {
  mu.validate();
  if (mu.support.empty() || mu.total_mass() == 0.0) return 0.0;
  const double vol = mu.support.cell_volume();
  return correlate_energy(autocorrelation(mu.support, mu.weights), table) / (vol * vol);
}

double measure_energy(const DiscreteMeasure& mu, const GaugeFunction& h, double tol) {
  if (mu.support.empty()) return 0.0;
  PairEnergyTable table(mu.support.dim(), mu.support.level(), h, tol);
  return measure_energy(mu, table);
}

double g_value(const DyadicSet& f, PairEnergyTable& table) {
  if (f.empty()) return 0.0;
  const double e = set_energy(f, table);
  if (!std::isfinite(e) || e <= 0.0) return 0.0;
  const double m = measure(f);
  return m * m / e;
}

double g_value(const DyadicSet& f, const GaugeFunction& h, double tol) {
  if (f.empty()) return 0.0;
  PairEnergyTable table(f.dim(), f.level(), h, tol);
  return g_value(f, table);
}

}  // namespace covlab
