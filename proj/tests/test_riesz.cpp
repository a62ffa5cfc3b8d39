#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hbmo/hermite_basis.hpp"
#include "hbmo/riesz.hpp"

using namespace hbmo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("riesz kernel basics") {
  CHECK_THROWS_AS(riesz_kernel(1, Point{1.0}, Point{1.0}), std::domain_error);
  CHECK_THROWS_AS(riesz_kernel(2, Point{1.0}, Point{0.0}),
                  std::invalid_argument);
  // odd under reflection through the origin in one dimension
  for (double y : {0.25, 0.8, 2.0}) {
    double plus = riesz_kernel(1, Point{0.0}, Point{y});
    double minus = riesz_kernel(1, Point{0.0}, Point{-y});
    CHECK_THAT(plus, WithinAbs(-minus, 1e-12 + 1e-10 * std::fabs(plus)));
  }
}

TEST_CASE("fixed diagonal rule matches the adaptive route") {
  RieszQuadPolicy pol;
  pol.abs_tol = 1e-11;
  double worst = 0.0;
  for (double b : {0.01, 0.03, 0.1, 0.3, 0.8, 1.5, 3.0, 6.0}) {
    RieszDiagonalRule rule(b);
    for (double a : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 12.0}) {
      Point x{(a + b) / 2}, y{(a - b) / 2};
      double ref = riesz_kernel(1, x, y, pol);
      if (std::fabs(ref) < 1e-12) continue;
      double err = std::fabs(rule(a) - ref) / std::fabs(ref);
      worst = std::max(worst, err);
      // mirrored rule equals the kernel with x and y swapped
      double swapped = riesz_kernel(1, y, x, pol);
      CHECK_THAT(rule.mirrored(a), WithinAbs(swapped, 1e-10 + 2e-4 * std::fabs(swapped)));
    }
  }
  INFO("worst batch-vs-adaptive relative error " << worst);
  CHECK(worst < 2e-4);
}

TEST_CASE("spectral action on the ground state") {
  // principal value of int R(x,y) h0(y) dy equals -h1(x)/sqrt(2);
  // symmetric excision with extrapolation of the excision radius
  const double h = 0.002;
  const int window = static_cast<int>(16.0 / h);
  for (double x : {0.0, 0.7, 1.3}) {
    auto pv = [&](int dmin) {
      double acc = 0.0;
      for (int d = window; d >= dmin; --d) {
        RieszDiagonalRule rule(d * h);
        double yl = x - d * h, yr = x + d * h;
        acc += (rule(x + yl) * hermite_fn(0, yl) +
                rule.mirrored(x + yr) * hermite_fn(0, yr)) *
               h;
      }
      return acc;
    };
    double f2 = pv(3), f4 = pv(5);
    double e1 = 2.5 * h, e2 = 4.5 * h;
    double ext = (e2 * f2 - e1 * f4) / (e2 - e1);
    double expect = -hermite_fn(1, x) / std::sqrt(2.0);
    CHECK_THAT(ext, WithinAbs(expect, 1e-4));
  }
}

TEST_CASE("size bound shape: Gaussian-weighted ratio stays bounded") {
  // |R(x,y)| |x-y| e^{c [ |x-y|^2 + |y||x-y| ]} over a coarse sweep, c = 1/16
  const double c = 1.0 / 16.0;
  double fitted = 0.0;
  for (double x = -4.0; x <= 4.0; x += 0.5)
    for (double y = -4.0; y <= 4.0; y += 0.5) {
      if (x == y) continue;
      double d = std::fabs(x - y);
      double v = std::fabs(riesz_kernel(1, Point{x}, Point{y})) * d *
                 std::exp(c * (d * d + std::fabs(y) * d));
      fitted = std::max(fitted, v);
    }
  INFO("fitted size constant on the coarse sweep: " << fitted);
  CHECK(std::isfinite(fitted));
  CHECK(fitted > 0.0);
  CHECK(fitted < 10.0);
}
