#include "covlab/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace covlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// K_ab = E(b - a); the 1/vol² factor is applied to reported values only.
class Kernel {
 public:
  Kernel(const DyadicSet& e, PairEnergyTable& table, std::size_t dense_limit)
      : dim_(e.dim()), cells_(e.cells()), table_(table) {
    const std::size_t m = cells_.size();
    if (m <= dense_limit) {
      dense_.resize(m * m);
      for (std::size_t b = 0; b < m; ++b) {
        for (std::size_t a = 0; a <= b; ++a) {
          const double v = entry(a, b);
          dense_[a * m + b] = v;
          dense_[b * m + a] = v;
        }
      }
    }
    diag_ = entry(0, 0);
  }

  std::size_t size() const { return cells_.size(); }
  double diag() const { return diag_; }

  void column(std::size_t j, std::vector<double>& out) {
    const std::size_t m = size();
    out.resize(m);
    if (!dense_.empty()) {
      std::copy(dense_.begin() + static_cast<std::ptrdiff_t>(j * m), dense_.begin() + static_cast<std::ptrdiff_t>((j + 1) * m), out.begin());
      return;
    }
    for (std::size_t a = 0; a < m; ++a) out[a] = entry(a, j);
  }

  void apply(const std::vector<double>& w, std::vector<double>& g) {
    const std::size_t m = size();
    g.assign(m, 0.0);
    std::vector<double> col;
    for (std::size_t b = 0; b < m; ++b) {
      if (w[b] == 0.0) continue;
      column(b, col);
      for (std::size_t a = 0; a < m; ++a) g[a] += col[a] * w[b];
    }
  }

 private:
  double entry(std::size_t a, std::size_t b) {
    std::array<std::int64_t, kMaxDim> off{};
    for (int i = 0; i < dim_; ++i) {
      const auto k = static_cast<std::size_t>(i);
      off[k] = static_cast<std::int64_t>(cells_[b][k]) - static_cast<std::int64_t>(cells_[a][k]);
    }
    return table_(std::span<const std::int64_t>(off.data(), static_cast<std::size_t>(dim_)));
  }

  int dim_;
  std::vector<CellIndex> cells_;
  PairEnergyTable& table_;
  std::vector<double> dense_;
  double diag_ = 0.0;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

GammaResult gamma(const DyadicSet& e, PairEnergyTable& table, const GammaOptions& options) {
  GammaResult out;
  out.minimizer.support = e;
  if (e.empty()) {
    out.value = kInf;
    return out;
  }
  if (e.dim() != table.dim() || e.level() != table.level()) throw std::invalid_argument("energy table does not match the set grid");
  const double s = table.gauge().exponent();
  if (table.gauge().kind() != GaugeFunction::Kind::power || !(s > 0.0 && s < e.dim())) {
    throw std::invalid_argument("gamma needs a power kernel with 0 < s < d");
  }
  if (e.size() > options.max_cells) throw ResourceLimitError("gamma: set has more cells than the solver cap");

  Kernel kernel(e, table, options.dense_limit);
  const std::size_t m = kernel.size();
  std::vector<double> w(m, 1.0 / static_cast<double>(m));
  std::vector<double> g;
  kernel.apply(w, g);
  double f = dot(w, g);
  std::vector<double> col;
  int it = 0;
  bool converged = false;
  for (; it < options.max_iters; ++it) {
    std::size_t i_min = 0;
    std::size_t j_max = m;
    for (std::size_t a = 0; a < m; ++a) {
      if (g[a] < g[i_min]) i_min = a;
      if (w[a] > 0.0 && (j_max == m || g[a] > g[j_max])) j_max = a;
    }
    const double gap_fw = 2.0 * (f - g[i_min]);
    const double gap_away = 2.0 * (g[j_max] - f);
    if (gap_fw <= options.rel_gap * f) {
      converged = true;
      break;
    }
    if (gap_fw >= gap_away) {
      kernel.column(i_min, col);
      const double curv = kernel.diag() - 2.0 * g[i_min] + f;
      const double step = curv > 0.0 ? std::min(1.0, (f - g[i_min]) / curv) : 1.0;
      for (std::size_t a = 0; a < m; ++a) {
        w[a] *= 1.0 - step;
        g[a] = (1.0 - step) * g[a] + step * col[a];
      }
      w[i_min] += step;
    } else {
      const double wj = w[j_max];
      const double step_max = wj / (1.0 - wj);
      kernel.column(j_max, col);
      const double curv = f - 2.0 * g[j_max] + kernel.diag();
      const double step = curv > 0.0 ? std::min(step_max, (g[j_max] - f) / curv) : step_max;
      for (std::size_t a = 0; a < m; ++a) {
        w[a] *= 1.0 + step;
        g[a] = (1.0 + step) * g[a] - step * col[a];
      }
      w[j_max] -= step * 1.0;
      if (step == step_max) w[j_max] = 0.0;
    }
    if ((it + 1) % 256 == 0) kernel.apply(w, g);
    f = dot(w, g);
  }

  double mass = 0.0;
  for (double& x : w) {
    x = std::max(0.0, x);
    mass += x;
  }
  for (double& x : w) x /= mass;
  out.minimizer.weights = w;
  out.iterations = it;
  out.value = measure_energy(out.minimizer, table);
  kernel.apply(w, g);
  const double g_min = *std::min_element(g.begin(), g.end());
  const double vol = e.cell_volume();
  out.duality_gap = std::max(0.0, 2.0 * (out.value - g_min / (vol * vol)));
  out.converged = converged || out.duality_gap <= options.rel_gap * out.value;
  return out;
}

GammaResult gamma(const DyadicSet& e, double s, const GammaOptions& options) {
  if (!(s > 0.0 && s < e.dim())) throw std::invalid_argument("gamma needs 0 < s < d");
  if (e.empty()) {
    GammaResult out;
    out.minimizer.support = e;
    out.value = kInf;
    return out;
  }
  PairEnergyTable table(e.dim(), e.level(), GaugeFunction::power(s), options.tol);
  return gamma(e, table, options);
}

double gamma_stability(const DyadicSet& e, const DyadicSet& f, double s, const GammaOptions& options) {
  return gamma(f, s, options).value - gamma(e, s, options).value;
}

GammaContentBound content_lower_from_gamma(std::span<const DyadicSet> chain, double s, const GammaOptions& options) {
  GammaContentBound out;
  if (chain.empty()) throw std::invalid_argument("empty chain");
  int finest = 0;
  for (std::size_t n = 0; n < chain.size(); ++n) {
    if (n > 0 && !is_subset(chain[n], chain[n - 1])) out.nested = false;
    const GammaResult r = gamma(chain[n], s, options);
    out.converged = out.converged && r.converged;
    out.max_gamma = std::max(out.max_gamma, r.value);
    finest = std::max(finest, chain[n].level());
  }
  out.value = std::isfinite(out.max_gamma) ? 1.0 / out.max_gamma : 0.0;
  out.caveat = "Gamma evaluated over cell-weighted densities up to level " + std::to_string(finest) +
               "; grid refinement can only lower each Gamma";
  if (!out.nested) out.caveat += "; chain is not nested";
  return out;
}

}  // namespace covlab
