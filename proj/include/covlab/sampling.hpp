#pragma once

// Reproducible i.i.d. placement of centers on the torus.

#include <cstdint>
#include <random>
#include <vector>

#include "covlab/dyadic.hpp"
#include "covlab/energy.hpp"

namespace covlab {

/// splitmix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x);
/// Per-trial seed: splitmix64(master + 0x9E3779B97F4A7C15 * (trial + 1)).
/// Independent of thread scheduling, so parallel trials reproduce serial runs.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

/// mt19937_64 plus a portable [0,1) draw (53 high bits).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

class SamplingDistribution {
 public:
  enum class Kind { uniform, density };

  static SamplingDistribution uniform(int dim);
  /// Cell-weighted density; masses are normalised to total 1.
  static SamplingDistribution density(DiscreteMeasure mu);

  Kind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  const DiscreteMeasure& measure() const noexcept { return mu_; }

  TorusPoint draw(Rng& rng) const;

 private:
  Kind kind_ = Kind::uniform;
  int dim_ = 1;
  DiscreteMeasure mu_;
  std::vector<double> cdf_;
  std::vector<CellIndex> cells_;
};

/// n i.i.d. draws; a pure function of (dist, n, seed).
std::vector<TorusPoint> sample_centers(const SamplingDistribution& dist, std::size_t n, std::uint64_t seed);

}  // namespace covlab
