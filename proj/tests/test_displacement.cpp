#include <cmath>
#include <numbers>
#include <random>

#include "covlab/displacement.hpp"
#include "doctest.h"

using namespace covlab;

TEST_CASE("nonlinear family respects its chart bound") {
  CHECK_THROWS(DisplacementFamily::nonlinear(1, 0.1, 1));  // 2πkε ≥ 1/2
  const DisplacementFamily f = DisplacementFamily::nonlinear(2, 0.02, 1);
  const double a = 2 * std::numbers::pi * 0.02;
  CHECK(f.bound() == doctest::Approx((1 + a) / (1 - a)));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 1000; ++t) {
    const double x = u(rng), y = u(rng);
    CHECK(f.dy(x, y) <= f.bound());
    CHECK(1.0 / f.dy(x, y) <= f.bound());
    // analytic partials against central differences
    const double h = 1e-6;
    CHECK(f.dy(x, y) == doctest::Approx((f.component(x, y + h) - f.component(x, y - h)) / (2 * h)).epsilon(1e-7));
    CHECK(f.dx(x, y) == doctest::Approx((f.component(x + h, y) - f.component(x - h, y)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("box images contain the images of interior points") {
  const DisplacementFamily f = DisplacementFamily::nonlinear(2, 0.03, 2);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 200; ++t) {
    const TorusPoint x = TorusPoint::of({u(rng), u(rng)});
    const Box b{{{-0.05, 0.01, 0}, {0.03, 0.09, 0}}};
    const Box img = f.image(x, b);
    for (int k = 0; k < 20; ++k) {
      const double y0 = b[0][0] + u(rng) * (b[1][0] - b[0][0]);
      const double y1 = b[0][1] + u(rng) * (b[1][1] - b[0][1]);
      const double z0 = f.component(x[0], y0), z1 = f.component(x[1], y1);
      CHECK(z0 >= img[0][0] - 1e-15);
      CHECK(z0 <= img[1][0] + 1e-15);
      CHECK(z1 >= img[0][1] - 1e-15);
      CHECK(z1 <= img[1][1] + 1e-15);
    }
  }
}

TEST_CASE("inverse family recovers centers within the derivative bound") {
  for (const DisplacementFamily& f : {DisplacementFamily::translation(2), DisplacementFamily::nonlinear(2, 0.02, 1),
                                      DisplacementFamily::nonlinear(1, 0.07, 1)}) {
    const InverseFamilyReport r = verify_inverse_family(f, 5000, 11);
    CHECK(r.failures == 0);
    CHECK(r.max_error < 1e-10);
    CHECK(r.max_inverse_derivative <= r.bound + 1e-6);
    CHECK(r.within_bound);
  }
  const DisplacementFamily t = DisplacementFamily::translation(1);
  double x = 0;
  REQUIRE(t.solve_center(0.3, 0.1, 0.0, x));
  CHECK(x == doctest::Approx(0.2));
}

TEST_CASE("jacobian is the product of axis derivatives") {
  const DisplacementFamily f = DisplacementFamily::nonlinear(3, 0.03, 2);
  const TorusPoint x = TorusPoint::of({0.1, 0.4, 0.8});
  const std::array<double, kMaxDim> y{0.2, 0.05, 0.9};
  CHECK(f.jacobian(x, y) == doctest::Approx(f.dy(0.1, 0.2) * f.dy(0.4, 0.05) * f.dy(0.8, 0.9)));
  CHECK(DisplacementFamily::translation(3).jacobian(x, y) == 1.0);
}
