#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hbmo/hermite_basis.hpp"
#include "hbmo/mehler.hpp"
#include "hbmo/quadrature.hpp"

using namespace hbmo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("meda parametrization") {
  MedaParam p(0.5);
  CHECK_THAT(p.time(), WithinRel(0.5493061443340548, 1e-14));
  // round trip s -> t -> s
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
  for (int q = 0; q < 200; ++q) {
    double s = u(rng);
    CHECK_THAT(meda_s_of_time(meda_time(s)), WithinRel(s, 1e-12));
  }
  // composition adds times
  CHECK_THAT(meda_time(meda_compose(0.3, 0.4)),
             WithinRel(meda_time(0.3) + meda_time(0.4), 1e-13));
  CHECK_THROWS_AS(MedaParam(0.0), std::domain_error);
  CHECK_THROWS_AS(MedaParam(1.0), std::domain_error);
  CHECK_THROWS_AS(MedaParam::from_time(0.0), std::domain_error);
}

TEST_CASE("heat kernel closed forms agree") {
  // frozen value at s = 1/2, x = y = 0 (one dimension)
  CHECK_THAT(heat_kernel_meda(MedaParam(0.5), Point{0.0}, Point{0.0}),
             WithinRel(0.34549414947133548, 1e-14));
  // the time form evaluates the displayed kernel independently
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> us(0.05, 0.95), ux(-3.0, 3.0);
  for (int n : {1, 2, 3}) {
    for (int q = 0; q < 200; ++q) {
      double s = us(rng);
      Point x(n), y(n);
      for (int a = 0; a < n; ++a) {
        x[a] = ux(rng);
        y[a] = ux(rng);
      }
      double wm = heat_kernel_meda(MedaParam(s), x, y);
      double wt = heat_kernel(meda_time(s), x, y);
      REQUIRE(wm > 0.0);
      CHECK_THAT(wt, WithinRel(wm, 1e-12));
      CHECK_THAT(heat_kernel_meda(MedaParam(s), y, x), WithinRel(wm, 1e-14));
    }
  }
  CHECK_THROWS_AS(heat_kernel(-1.0, Point{0.0}, Point{0.0}),
                  std::domain_error);
}

TEST_CASE("gradient and s-derivative match finite differences") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> us(0.05, 0.95), ux(-2.5, 2.5);
  for (int q = 0; q < 100; ++q) {
    double s = us(rng);
    Point x{ux(rng), ux(rng)}, y{ux(rng), ux(rng)};
    Point g = heat_kernel_grad_x(MedaParam(s), x, y);
    const double hstep = 1e-6;
    for (int a = 0; a < 2; ++a) {
      Point xp = x, xm = x;
      xp[a] += hstep;
      xm[a] -= hstep;
      double fd = (heat_kernel_meda(MedaParam(s), xp, y) -
                   heat_kernel_meda(MedaParam(s), xm, y)) /
                  (2.0 * hstep);
      if (std::fabs(fd) > 1e-12) CHECK_THAT(g[a], WithinRel(fd, 1e-6));
    }
    double ds = heat_kernel_ds(MedaParam(s), x, y);
    double fd = (heat_kernel_meda(MedaParam(s + 1e-7), x, y) -
                 heat_kernel_meda(MedaParam(s - 1e-7), x, y)) /
                2e-7;
    if (std::fabs(fd) > 1e-12) CHECK_THAT(ds, WithinRel(fd, 1e-5));
  }
  // gradient vanishes at x = y = 0
  Point g0 = heat_kernel_grad_x(MedaParam(0.3), Point{0.0}, Point{0.0});
  CHECK(g0[0] == 0.0);
}

TEST_CASE("mass function: closed form against quadrature") {
  CHECK_THAT(heat_action_on_one(MedaParam(0.5), Point{0.0}),
             WithinRel(0.7745966692414834, 1e-14));
  // n = 2 at x = (1,0)
  CHECK_THAT(heat_action_on_one(MedaParam(0.5), Point{1.0, 0.0}),
             WithinRel(0.40219202762138358, 1e-13));
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> us(0.02, 0.98), ux(-3.0, 3.0);
  for (int q = 0; q < 25; ++q) {
    double s = us(rng);
    double x = ux(rng);
    auto f = [&](double y) {
      return heat_kernel_meda(MedaParam(s), Point{x}, Point{y});
    };
    double quad = adaptive_quadrature(f, -20.0, 20.0, 1e-12).value;
    CHECK_THAT(quad, WithinAbs(heat_action_on_one(MedaParam(s), Point{x}),
                               1e-9));
  }
  // limit s -> 0+ is 1 for every x: the identity that pins the prefactor
  for (double x : {0.0, 1.0, 3.0})
    CHECK_THAT(heat_action_on_one(MedaParam(1e-9), Point{x}),
               WithinAbs(1.0, 1e-7));
  // decreasing in s
  double prev = 2.0;
  for (double s = 0.05; s < 1.0; s += 0.05) {
    double v = heat_action_on_one(MedaParam(s), Point{1.5});
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("mass derivative and tail masses match finite differences") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> us(0.05, 0.9), ux(-2.0, 2.0);
  for (int q = 0; q < 50; ++q) {
    double s = us(rng), x = ux(rng);
    double d = heat_action_on_one_ds(MedaParam(s), x * x, 1);
    double fd = (heat_action_on_one(MedaParam(s + 1e-7), x * x, 1) -
                 heat_action_on_one(MedaParam(s - 1e-7), x * x, 1)) /
                2e-7;
    CHECK_THAT(d, WithinRel(fd, 1e-5));
    CHECK(d < 0.0);

    const double L = 2.5;
    double tl = heat_tail_mass_left_ds(MedaParam(s), x, L);
    double fdl = (heat_tail_mass_left(MedaParam(s + 1e-7), x, L) -
                  heat_tail_mass_left(MedaParam(s - 1e-7), x, L)) /
                 2e-7;
    CHECK_THAT(tl, WithinAbs(fdl, 1e-6 + 1e-5 * std::fabs(fdl)));
    double tr = heat_tail_mass_right_ds(MedaParam(s), x, L);
    double fdr = (heat_tail_mass_right(MedaParam(s + 1e-7), x, L) -
                  heat_tail_mass_right(MedaParam(s - 1e-7), x, L)) /
                 2e-7;
    CHECK_THAT(tr, WithinAbs(fdr, 1e-6 + 1e-5 * std::fabs(fdr)));

    double im = heat_mass_on_interval_ds(MedaParam(s), x, -1.0, 0.7);
    double fdi = (heat_mass_on_interval(MedaParam(s + 1e-7), x, -1.0, 0.7) -
                  heat_mass_on_interval(MedaParam(s - 1e-7), x, -1.0, 0.7)) /
                 2e-7;
    CHECK_THAT(im, WithinAbs(fdi, 1e-6 + 1e-5 * std::fabs(fdi)));
  }
}

TEST_CASE("semigroup identity under quadrature") {
  for (auto [s1, s2] : {std::pair{0.2, 0.3}, std::pair{0.5, 0.25}}) {
    double t1 = meda_time(s1), t2 = meda_time(s2);
    for (auto [x, y] : {std::pair{0.0, 0.5}, std::pair{-1.0, 2.0}}) {
      auto f = [&](double z) {
        return heat_kernel(t1, Point{x}, Point{z}) *
               heat_kernel(t2, Point{z}, Point{y});
      };
      double conv = adaptive_quadrature(f, -20.0, 20.0, 1e-12).value;
      CHECK_THAT(conv,
                 WithinRel(heat_kernel(t1 + t2, Point{x}, Point{y}), 1e-8));
    }
  }
}

TEST_CASE("spectral identity: kernel against eigenfunctions") {
  for (int k : {0, 1, 4, 8}) {
    for (double s : {0.1, 0.5, 0.9}) {
      for (double x : {0.0, 0.7, -1.3}) {
        auto f = [&](double y) {
          return heat_kernel_meda(MedaParam(s), Point{x}, Point{y}) *
                 hermite_fn(k, y);
        };
        double quad = adaptive_quadrature(f, -16.0, 16.0, 1e-14).value;
        double expect =
            std::exp(-(2.0 * k + 1.0) * meda_time(s)) * hermite_fn(k, x);
        // double-precision quadrature bottoms out near 1e-17 absolute, so
        // tiny orbit values carry an absolute floor
        if (std::fabs(expect) > 1e-14)
          CHECK_THAT(quad, WithinRel(expect, 1e-6) || WithinAbs(expect, 1e-16));
      }
    }
  }
  // the spectral factor at s = 1/2, k = 0 equals 3^{-1/2}
  auto f = [&](double y) {
    return heat_kernel_meda(MedaParam(0.5), Point{0.0}, Point{y}) *
           hermite_fn(0, y);
  };
  double quad = adaptive_quadrature(f, -16.0, 16.0, 1e-14).value;
  CHECK_THAT(quad / hermite_fn(0, 0.0), WithinRel(0.5773502691896258, 1e-9));
}
