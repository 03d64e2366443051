#include "covlab/autocorrelation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace covlab {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct AxisLayout {
  std::int64_t start = 0;  // first occupied coordinate of the shortest covering arc
  std::int64_t span = 0;   // length of that arc
  std::int64_t length = 0; // transform length on this axis
  bool periodic = true;
};

std::int64_t reduce_offset(std::int64_t d, std::int64_t n) {
  d %= n;
  if (d < 0) d += n;
  if (d > n / 2) d -= n;
  return d;
}

std::array<AxisLayout, kMaxDim> layout(const DyadicSet& s, const std::vector<CellIndex>& cells) {
  const std::int64_t n = static_cast<std::int64_t>(s.cells_per_axis());
  std::array<AxisLayout, kMaxDim> out{};
  for (int i = 0; i < s.dim(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    std::vector<std::int64_t> u;
    u.reserve(cells.size());
    for (const auto& c : cells) u.push_back(c[k]);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    std::int64_t best_gap = u.front() + n - u.back();
    std::int64_t start = u.front();
    for (std::size_t j = 0; j + 1 < u.size(); ++j) {
      if (u[j + 1] - u[j] > best_gap) {
        best_gap = u[j + 1] - u[j];
        start = u[j + 1];
      }
    }
    AxisLayout& a = out[k];
    a.start = start;
    a.span = n - best_gap + 1;
    if (2 * a.span <= n) {
      a.periodic = false;
      a.length = 1;
      while (a.length < 2 * a.span - 1) a.length <<= 1;
    } else {
      a.length = n;
    }
  }
  return out;
}

OffsetTable direct(const DyadicSet& s, const std::vector<CellIndex>& cells, std::span<const double> w) {
  const int dim = s.dim();
  const std::int64_t n = static_cast<std::int64_t>(s.cells_per_axis());
  const std::int64_t shift = n >= 2 ? n / 2 - 1 : 0;
  std::unordered_map<std::uint64_t, double> acc;
  acc.reserve(cells.size() * 4);
  auto key_of = [&](const Offset& o) {
    std::uint64_t key = 0;
    for (int i = dim - 1; i >= 0; --i) {
      key = key * static_cast<std::uint64_t>(n) +
            static_cast<std::uint64_t>(o[static_cast<std::size_t>(i)] + shift);
    }
    return key;
  };
  for (std::size_t a = 0; a < cells.size(); ++a) {
    const double wa = w.empty() ? 1.0 : w[a];
    for (std::size_t b = 0; b < cells.size(); ++b) {
      Offset o{};
      for (int i = 0; i < dim; ++i) {
        const auto k = static_cast<std::size_t>(i);
        o[k] = static_cast<std::int32_t>(
            reduce_offset(static_cast<std::int64_t>(cells[b][k]) - static_cast<std::int64_t>(cells[a][k]), n));
      }
      acc[key_of(o)] += wa * (w.empty() ? 1.0 : w[b]);
    }
  }
  std::vector<std::pair<std::uint64_t, double>> sorted(acc.begin(), acc.end());
  std::sort(sorted.begin(), sorted.end());
  OffsetTable t;
  t.dim = dim;
  t.level = s.level();
  for (const auto& [key, v] : sorted) {
    if (v == 0.0) continue;
    Offset o{};
    std::uint64_t rest = key;
    for (int i = 0; i < dim; ++i) {
      o[static_cast<std::size_t>(i)] =
          static_cast<std::int32_t>(static_cast<std::int64_t>(rest % static_cast<std::uint64_t>(n)) - shift);
      rest /= static_cast<std::uint64_t>(n);
    }
    t.offsets.push_back(o);
    t.values.push_back(v);
  }
  return t;
}

OffsetTable via_fft(const DyadicSet& s, const std::vector<CellIndex>& cells, std::span<const double> w,
                    const std::array<AxisLayout, kMaxDim>& lay) {
  const int dim = s.dim();
  const std::int64_t n = static_cast<std::int64_t>(s.cells_per_axis());
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(lay[static_cast<std::size_t>(i)].length);
  const auto inner = static_cast<std::size_t>(lay[0].length);
  const std::size_t half_inner = inner / 2 + 1;
  const std::size_t spectral = total / inner * half_inner;

  double* grid = fftw_alloc_real(total);
  fftw_complex* spec = fftw_alloc_complex(spectral);
  if (grid == nullptr || spec == nullptr) {
    fftw_free(grid);
    fftw_free(spec);
    throw ResourceLimitError("autocorrelation transform allocation failed");
  }
  std::fill(grid, grid + total, 0.0);

  // FFTW is row-major with the last listed dimension contiguous; axis 0 is contiguous here.
  int dims[kMaxDim];
  for (int i = 0; i < dim; ++i) dims[i] = static_cast<int>(lay[static_cast<std::size_t>(dim - 1 - i)].length);
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd = fftw_plan_dft_r2c(dim, dims, grid, spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r(dim, dims, spec, grid, FFTW_ESTIMATE);
  }

  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::size_t idx = 0;
    std::size_t stride = 1;
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      std::int64_t x = cells[c][k];
      if (!lay[k].periodic) x = ((x - lay[k].start) % n + n) % n;
      idx += static_cast<std::size_t>(x) * stride;
      stride *= static_cast<std::size_t>(lay[k].length);
    }
    grid[idx] = w.empty() ? 1.0 : w[c];
  }
  fftw_execute(fwd);
  for (std::size_t k = 0; k < spectral; ++k) {
    spec[k][0] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    spec[k][1] = 0.0;
  }
  fftw_execute(inv);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }

  const double scale = 1.0 / static_cast<double>(total);
  const double peak = grid[0] * scale;
  OffsetTable t;
  t.dim = dim;
  t.level = s.level();
  std::array<std::int64_t, kMaxDim> pos{};
  for (std::size_t idx = 0; idx < total; ++idx) {
    double v = grid[idx] * scale;
    if (w.empty()) {
      v = std::nearbyint(v);
    } else if (v <= 1e-12 * peak) {
      v = 0.0;
    }
    if (v != 0.0) {
      Offset o{};
      for (int i = 0; i < dim; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const std::int64_t len = lay[k].length;
        std::int64_t d = pos[k];
        if (d > len / 2) d -= len;
        o[k] = static_cast<std::int32_t>(reduce_offset(d, n));
      }
      t.offsets.push_back(o);
      t.values.push_back(v);
    }
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (++pos[k] < lay[k].length) break;
      pos[k] = 0;
    }
  }
  fftw_free(grid);
  fftw_free(spec);
  return t;
}

}  // namespace

OffsetTable autocorrelation(const DyadicSet& s, std::span<const double> weights, CorrelationRoute route) {
  if (!weights.empty() && weights.size() != s.size()) throw std::invalid_argument("weight count does not match set size");
  OffsetTable empty;
  empty.dim = s.dim();
  empty.level = s.level();
  if (s.empty()) return empty;
  const auto cells = s.cells();
  const auto lay = layout(s, cells);
  if (route == CorrelationRoute::automatic) {
    double total = 1.0;
    for (int i = 0; i < s.dim(); ++i) total *= static_cast<double>(lay[static_cast<std::size_t>(i)].length);
    const double m = static_cast<double>(s.size());
    route = m * m <= 0.1 * total * std::log2(total + 2.0) ? CorrelationRoute::direct : CorrelationRoute::fft;
  }
  return route == CorrelationRoute::direct ? direct(s, cells, weights) : via_fft(s, cells, weights, lay);
}

}  // namespace covlab
