#pragma once

// Dimension gauges h(r); energies use the kernel 1/h(|x-y|) and contents sum
// h(diam).

#include <string>
#include <vector>

namespace covlab {

class GaugeFunction {
 public:
  enum class Kind { power, power_log, tabulated };

  /// h(r) = r^s.
  static GaugeFunction power(double s);
  /// h(r) = r^d |log r|^q on (0, R] with R = e^{-q/d}, constant h(R) beyond.
  static GaugeFunction power_log(int dim, double log_exponent = 2.0);
  /// Log-log piecewise-power interpolation of (r_k, h_k), r_k > 0 strictly
  /// increasing; power-law continuation below r_0, constant above the last
  /// sample. Throws unless h is increasing, tends to 0 at 0 and h r^{-d} is
  /// nonincreasing.
  static GaugeFunction tabulated(int dim, std::vector<double> r, std::vector<double> h);

  Kind kind() const noexcept { return kind_; }
  /// Power exponent s (power kind) or d (power_log kind).
  double exponent() const noexcept { return s_; }
  double log_exponent() const noexcept { return q_; }
  /// Radius beyond which h is held constant; +inf when unbounded.
  double cutoff() const noexcept { return cutoff_; }

  double operator()(double r) const;
  /// 1/h(r); +inf at r = 0.
  double kernel(double r) const;

  /// M_j(rho) = ∫_0^rho r^{d-1+j} / h(r) dr, +inf when divergent at 0.
  double radial_moment(int dim, int j, double rho) const;
  /// Whether 1/h(|x|) is locally integrable in dimension dim.
  bool integrable(int dim) const;
  /// Exponent used by the far-field midpoint criterion.
  double decay_exponent(int dim) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::power;
  double s_ = 1.0;
  double q_ = 0.0;
  int dim_ = 0;
  double cutoff_ = 0.0;
  double h_cut_ = 0.0;
  std::vector<double> r_;
  std::vector<double> h_;
  std::vector<double> slope_;  // log-log slope of segment k (k = 0 also used below r_0)
};

}  // namespace covlab
