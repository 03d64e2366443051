#include <cmath>

#include "covlab/critical.hpp"
#include "doctest.h"

using namespace covlab;

TEST_CASE("power series have critical exponent 1/alpha") {
  for (double alpha : {1.5, 2.0, 3.0}) {
    SeriesSchedule s;
    s.term = [alpha](std::uint64_t n, double t) { return std::pow(static_cast<double>(n), -alpha * t); };
    const CriticalResult r = critical_exponent(s);
    CHECK(r.value == doctest::Approx(1.0 / alpha).epsilon(0.03));
    CHECK(r.convention == "interior");
    CHECK_FALSE(r.ambiguous);
    CHECK(r.terms_monotone);
  }
}

TEST_CASE("boundary conventions") {
  SeriesSchedule conv;
  conv.term = [](std::uint64_t n, double t) { return std::pow(static_cast<double>(n), -(2.0 + t)); };
  CHECK(critical_exponent(conv).convention == "all_convergent");
  CHECK(critical_exponent(conv).value == 0.0);
  SeriesSchedule div;
  div.term = [](std::uint64_t n, double t) { return std::pow(static_cast<double>(n), -0.5 * t); };
  CHECK(critical_exponent(div).convention == "all_divergent");
  CHECK(critical_exponent(div).value == 1.0);
}

TEST_CASE("classification near the boundary") {
  SeriesSchedule s;
  s.term = [](std::uint64_t n, double t) { return std::pow(static_cast<double>(n), -2.0 * t); };
  CHECK(classify_divergence(s, 0.45).divergent);
  CHECK_FALSE(classify_divergence(s, 0.55).divergent);
}
