#include "covlab/sampling.hpp"

#include <algorithm>
#include <stdexcept>

namespace covlab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return splitmix64(master + 0x9E3779B97F4A7C15ULL * (trial + 1));
}

SamplingDistribution SamplingDistribution::uniform(int dim) {
  check_dim_level(dim, 0);
  SamplingDistribution out;
  out.dim_ = dim;
  return out;
}

SamplingDistribution SamplingDistribution::density(DiscreteMeasure mu) {
  mu.validate();
  const double total = mu.total_mass();
  if (!(total > 0.0)) throw std::invalid_argument("density needs positive total mass");
  SamplingDistribution out;
  out.kind_ = Kind::density;
  out.dim_ = mu.support.dim();
  for (double& w : mu.weights) w /= total;
  out.cells_ = mu.support.cells();
  out.cdf_.resize(mu.weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.weights.size(); ++i) {
    acc += mu.weights[i];
    out.cdf_[i] = acc;
  }
  out.cdf_.back() = 1.0;
  out.mu_ = std::move(mu);
  return out;
}

TorusPoint SamplingDistribution::draw(Rng& rng) const {
  std::array<double, kMaxDim> x{};
  if (kind_ == Kind::uniform) {
    for (int i = 0; i < dim_; ++i) x[static_cast<std::size_t>(i)] = rng.uniform();
    return TorusPoint(dim_, std::span<const double>(x.data(), static_cast<std::size_t>(dim_)));
  }
  const double u = rng.uniform();
  // upper_bound skips zero-mass cells: a draw lands only where cdf strictly increases.
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  const CellIndex& c = cells_[static_cast<std::size_t>(it - cdf_.begin())];
  const double side = mu_.support.cell_side();
  for (int i = 0; i < dim_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    x[k] = (static_cast<double>(c[k]) + rng.uniform()) * side;
  }
  return TorusPoint(dim_, std::span<const double>(x.data(), static_cast<std::size_t>(dim_)));
}

std::vector<TorusPoint> sample_centers(const SamplingDistribution& dist, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_centers needs n >= 1");
  Rng rng(seed);
  std::vector<TorusPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(dist.draw(rng));
  return out;
}

}  // namespace covlab
