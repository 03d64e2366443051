#pragma once

// Critical exponent of a one-parameter family of series Σ_n a_n(t): the
// boundary between divergence (small t) and convergence (large t).

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace covlab {

struct SeriesSchedule {
  std::function<double(std::uint64_t n, double t)> term;  ///< a_n(t) ≥ 0, n ≥ 1
  std::uint64_t n_max = 100000;
  double t_lo = 0.0;
  double t_hi = 1.0;
};

struct CriticalOptions {
  double tol_t = 0.01;
  /// Divergent iff the log-log slope of dyadic block sums exceeds this.
  double threshold = 0.0;
  int window = 6;        ///< number of top dyadic blocks in the slope fit
  int grid_points = 11;  ///< coarse t grid for the monotonicity check
  /// 0 sums every term; otherwise each block sum is estimated from this many
  /// log-spaced terms (for expensive evaluators).
  int block_samples = 0;
};

struct ExponentSample {
  double t = 0.0;
  bool divergent = false;
  double slope = 0.0;
};

struct CriticalResult {
  double value = 0.0;
  /// "interior", "all_divergent" (value = t_hi) or "all_convergent" (value = t_lo).
  std::string convention;
  bool ambiguous = false;       ///< classification not monotone on the coarse grid
  bool terms_monotone = true;   ///< a_n(t) nonincreasing in t on the sampled n
  std::vector<ExponentSample> table;  ///< every classification made, in order
};

/// Block-sum slope at one t.
ExponentSample classify_divergence(const SeriesSchedule& sched, double t, const CriticalOptions& options = {});

CriticalResult critical_exponent(const SeriesSchedule& sched, const CriticalOptions& options = {});

}  // namespace covlab
