#include "covlab/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace covlab {

namespace {

double block_sum(const SeriesSchedule& sched, double t, std::uint64_t lo, std::uint64_t hi, int samples) {
  // Terms lo..hi-1.
  if (samples <= 0 || hi - lo <= static_cast<std::uint64_t>(samples)) {
    double sum = 0.0;
    for (std::uint64_t n = lo; n < hi; ++n) sum += sched.term(n, t);
    return sum;
  }
  double mean = 0.0;
  const double a = std::log(static_cast<double>(lo));
  const double b = std::log(static_cast<double>(hi - 1));
  for (int k = 0; k < samples; ++k) {
    const double x = a + (b - a) * (k + 0.5) / samples;
    mean += sched.term(static_cast<std::uint64_t>(std::llround(std::exp(x))), t);
  }
  return mean / samples * static_cast<double>(hi - lo);
}

void validate(const SeriesSchedule& sched) {
  if (!sched.term) throw std::invalid_argument("series schedule has no term evaluator");
  if (sched.n_max < 4) throw std::invalid_argument("n_max must be at least 4");
  if (!(sched.t_lo < sched.t_hi)) throw std::invalid_argument("t range must satisfy t_lo < t_hi");
}

}  // namespace

ExponentSample classify_divergence(const SeriesSchedule& sched, double t, const CriticalOptions& options) {
  validate(sched);
  // Complete blocks [2^k, 2^{k+1}) inside [1, n_max].
  int top = 0;
  while ((std::uint64_t{2} << (top + 1)) - 1 <= sched.n_max) ++top;
  const int first = std::max(0, top - std::max(2, options.window) + 1);
  std::vector<double> xs;
  std::vector<double> ys;
  bool vanished = false;
  for (int k = first; k <= top; ++k) {
    const std::uint64_t lo = std::uint64_t{1} << k;
    const double b = block_sum(sched, t, lo, lo << 1, options.block_samples);
    if (!(b > 0.0)) {
      vanished = true;
      continue;
    }
    xs.push_back(k * std::log(2.0));
    ys.push_back(std::log(b));
  }
  ExponentSample out;
  out.t = t;
  if (xs.size() < 2) {
    out.slope = -std::numeric_limits<double>::infinity();
    out.divergent = false;
    return out;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  out.slope = sxy / sxx;
  out.divergent = !vanished && out.slope > options.threshold;
  return out;
}

CriticalResult critical_exponent(const SeriesSchedule& sched, const CriticalOptions& options) {
  validate(sched);
  if (!(options.tol_t > 0.0)) throw std::invalid_argument("tol_t must be positive");
  CriticalResult out;
  const int grid = std::max(2, options.grid_points);

  // Pre-condition spot check: a_n(t) nonincreasing in t.
  for (std::uint64_t n : {std::uint64_t{1}, std::uint64_t{2}, sched.n_max / 4, sched.n_max / 2, sched.n_max}) {
    if (n == 0) continue;
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
      const double t = sched.t_lo + (sched.t_hi - sched.t_lo) * i / (grid - 1);
      const double a = sched.term(n, t);
      if (a < 0.0) throw std::invalid_argument("series terms must be nonnegative");
      if (a > prev * (1.0 + 1e-12)) out.terms_monotone = false;
      prev = a;
    }
  }

  std::vector<ExponentSample> coarse;
  for (int i = 0; i < grid; ++i) {
    const double t = sched.t_lo + (sched.t_hi - sched.t_lo) * i / (grid - 1);
    coarse.push_back(classify_divergence(sched, t, options));
  }
  out.table = coarse;
  for (int i = 1; i < grid; ++i) {
    if (coarse[static_cast<std::size_t>(i)].divergent && !coarse[static_cast<std::size_t>(i) - 1].divergent) {
      out.ambiguous = true;
    }
  }
  if (coarse.back().divergent) {
    out.value = sched.t_hi;
    out.convention = "all_divergent";
    return out;
  }
  if (!coarse.front().divergent) {
    out.value = sched.t_lo;
    out.convention = "all_convergent";
    return out;
  }
  // Bracket at the first divergent -> convergent transition.
  std::size_t i = 1;
  while (coarse[i].divergent) ++i;
  double lo = coarse[i - 1].t;
  double hi = coarse[i].t;
  while (hi - lo > options.tol_t) {
    const double mid = 0.5 * (lo + hi);
    const ExponentSample e = classify_divergence(sched, mid, options);
    out.table.push_back(e);
    if (e.divergent) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.value = 0.5 * (lo + hi);
  out.convention = "interior";
  return out;
}

}  // namespace covlab
