#include "covlab/gauge.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "covlab/quadrature.hpp"

namespace covlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ∫_x0^x1 r^{e-1} dr, with e = 0 meaning log.
double power_integral(double e, double x0, double x1) {
  if (std::abs(e) < 1e-14) return std::log(x1 / x0);
  return (std::pow(x1, e) - std::pow(x0, e)) / e;
}

}  // namespace

GaugeFunction GaugeFunction::power(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("power gauge exponent must be positive");
  GaugeFunction g;
  g.kind_ = Kind::power;
  g.s_ = s;
  g.cutoff_ = kInf;
  return g;
}

GaugeFunction GaugeFunction::power_log(int dim, double log_exponent) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (!(log_exponent > 0.0)) throw std::invalid_argument("log exponent must be positive");
  GaugeFunction g;
  g.kind_ = Kind::power_log;
  g.dim_ = dim;
  g.s_ = dim;
  g.q_ = log_exponent;
  g.cutoff_ = std::exp(-log_exponent / dim);
  g.h_cut_ = std::pow(g.cutoff_, dim) * std::pow(log_exponent / dim, log_exponent);
  return g;
}

GaugeFunction GaugeFunction::tabulated(int dim, std::vector<double> r, std::vector<double> h) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (r.size() != h.size() || r.size() < 2) throw std::invalid_argument("tabulated gauge needs at least two samples");
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (!(r[k] > 0.0) || !(h[k] > 0.0)) throw std::invalid_argument("tabulated samples must be positive");
    if (k > 0 && !(r[k] > r[k - 1])) throw std::invalid_argument("tabulated radii must increase");
    if (k > 0 && !(h[k] > h[k - 1])) throw std::invalid_argument("tabulated gauge must be increasing");
  }
  GaugeFunction g;
  g.kind_ = Kind::tabulated;
  g.dim_ = dim;
  g.cutoff_ = r.back();
  g.h_cut_ = h.back();
  for (std::size_t k = 0; k + 1 < r.size(); ++k) {
    const double a = std::log(h[k + 1] / h[k]) / std::log(r[k + 1] / r[k]);
    if (a > dim + 1e-12) throw std::invalid_argument("tabulated gauge must have h(r) r^-d nonincreasing");
    g.slope_.push_back(a);
  }
  g.s_ = g.slope_.front();
  g.r_ = std::move(r);
  g.h_ = std::move(h);
  return g;
}

double GaugeFunction::operator()(double r) const {
  if (r <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::power:
      return std::pow(r, s_);
    case Kind::power_log:
      if (r >= cutoff_) return h_cut_;
      return std::pow(r, s_) * std::pow(-std::log(r), q_);
    case Kind::tabulated: {
      if (r >= r_.back()) return h_.back();
      if (r <= r_.front()) return h_.front() * std::pow(r / r_.front(), slope_.front());
      std::size_t k = 0;
      while (r > r_[k + 1]) ++k;
      return h_[k] * std::pow(r / r_[k], slope_[k]);
    }
  }
  return 0.0;
}

double GaugeFunction::kernel(double r) const {
  if (r <= 0.0) return kInf;
  if (kind_ == Kind::power) return std::pow(r, -s_);
  return 1.0 / (*this)(r);
}

bool GaugeFunction::integrable(int dim) const {
  switch (kind_) {
    case Kind::power:
      return s_ < dim;
    case Kind::power_log:
      return dim_ == dim && q_ > 1.0;
    case Kind::tabulated:
      return slope_.front() < dim;
  }
  return false;
}

double GaugeFunction::decay_exponent(int dim) const {
  if (kind_ == Kind::power) return s_;
  return dim + 1.0;
}

double GaugeFunction::radial_moment(int dim, int j, double rho) const {
  if (rho <= 0.0) return 0.0;
  const double e = dim + j;
  switch (kind_) {
    case Kind::power:
      if (s_ >= e) return kInf;
      return std::pow(rho, e - s_) / (e - s_);
    case Kind::power_log: {
      if (dim != dim_) throw std::invalid_argument("power-log gauge used in the wrong dimension");
      const double top = std::min(rho, cutoff_);
      double inner = 0.0;
      const double L = -std::log(top);
      if (j == 0) {
        if (q_ <= 1.0) return kInf;
        inner = std::pow(L, 1.0 - q_) / (q_ - 1.0);
      } else {
        // r = top e^{-x}: top^j ∫_0^∞ e^{-jx} (L + x)^{-q} dx.
        const double q = q_;
        const double jj = j;
        auto f = [&](double x) { return std::exp(-jj * x) * std::pow(L + x, -q); };
        double sum = 0.0;
        double a = 0.0;
        double width = 0.5 / jj;
        while (a < 60.0 / jj) {
          sum += integrate_gl(f, a, a + width, 16);
          a += width;
          width *= 2.0;
        }
        inner = std::pow(top, jj) * sum;
      }
      if (rho > cutoff_) inner += power_integral(e, cutoff_, rho) / h_cut_;
      return inner;
    }
    case Kind::tabulated: {
      const double a0 = slope_.front();
      if (a0 >= e) return kInf;
      const double x0 = std::min(rho, r_.front());
      double sum = std::pow(r_.front(), a0) / h_.front() * std::pow(x0, e - a0) / (e - a0);
      for (std::size_t k = 0; k + 1 < r_.size() && rho > r_[k]; ++k) {
        const double x1 = std::min(rho, r_[k + 1]);
        sum += std::pow(r_[k], slope_[k]) / h_[k] * power_integral(e - slope_[k], r_[k], x1);
      }
      if (rho > r_.back()) sum += power_integral(e, r_.back(), rho) / h_.back();
      return sum;
    }
  }
  return 0.0;
}

std::string GaugeFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::power:
      os << "power(s=" << s_ << ")";
      break;
    case Kind::power_log:
      os << "power_log(d=" << dim_ << ",q=" << q_ << ")";
      break;
    case Kind::tabulated:
      os << "tabulated(" << r_.size() << " samples)";
      break;
  }
  return os.str();
}

}  // namespace covlab
