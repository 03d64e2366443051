#pragma once

// Weighted autocorrelation C(δ) = Σ_a w_a w_{a+δ} of a cell set on the torus
// grid. Pair sums over a set that depend only on the offset b - a reduce to
// Σ_δ C(δ)·K(δ).

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "covlab/dyadic.hpp"

namespace covlab {

using Offset = std::array<std::int32_t, kMaxDim>;

struct OffsetTable {
  int dim = 1;
  int level = 0;
  /// Offsets reduced per axis into (-N/2, N/2]; entries with C = 0 omitted.
  std::vector<Offset> offsets;
  std::vector<double> values;
};

enum class CorrelationRoute { automatic, direct, fft };

/// weights empty means unit weight per cell (values are then exact integers).
OffsetTable autocorrelation(const DyadicSet& s, std::span<const double> weights = {},
                            CorrelationRoute route = CorrelationRoute::automatic);

}  // namespace covlab
