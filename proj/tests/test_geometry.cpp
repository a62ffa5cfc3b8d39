#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hbmo/geometry.hpp"

using namespace hbmo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("critical radius branches") {
  CHECK(critical_radius(Point{0.0}) == 0.5);
  CHECK(critical_radius(Point{1.0}) == 0.5);  // both branches agree
  CHECK(critical_radius(Point{-1.0}) == 0.5);
  CHECK_THAT(critical_radius(Point{3.0, 0.0}), WithinAbs(0.25, 1e-15));
  // in (0, 1/2] and the identity gamma (1+|x|) = 1 above |x| = 1
  for (double r : {1.0, 1.5, 2.0, 7.0, 40.0}) {
    double g = critical_radius_from_norm(r);
    CHECK(g > 0.0);
    CHECK(g <= 0.5);
    CHECK_THAT(g * (1.0 + r), WithinAbs(1.0, 1e-15));
  }
  for (double r : {0.0, 0.3, 0.999}) CHECK(critical_radius_from_norm(r) == 0.5);
}

TEST_CASE("gamma comparability") {
  CHECK(gamma_comparability(Point{2.0}, Point{2.0}, 1.0) == 1.0);
  // |x-y| = 0.2 <= gamma(2) = 1/3; ratio = (1/3)/(1/3.2)
  CHECK_THAT(gamma_comparability(Point{2.0}, Point{2.2}, 1.0),
             WithinRel(1.0666666666666667, 1e-12));
  CHECK_THROWS_AS(gamma_comparability(Point{2.0}, Point{5.0}, 1.0),
                  std::invalid_argument);
}

TEST_CASE("gamma comparability sweep: fitted M below 4 for C = 2") {
  std::mt19937_64 rng(991);
  std::uniform_real_distribution<double> ux(-8.0, 8.0), uu(-1.0, 1.0);
  double worst = 0.0;
  int admitted = 0;
  while (admitted < 10000) {
    Point x{ux(rng)};
    double g = critical_radius(x);
    Point y{x[0] + 2.0 * g * uu(rng)};
    double ratio = gamma_comparability(x, y, 2.0);
    worst = std::max(worst, ratio);
    ++admitted;
  }
  INFO("fitted comparability constant M(2) = " << worst);
  CHECK(worst < 4.0);
  CHECK(worst >= 1.0);
}

TEST_CASE("covering: single critical ball suffices inside the unit zone") {
  SpaceContext ctx(1, 0.4, 1e-8);
  CriticalCovering cov = build_critical_covering(ctx);
  REQUIRE(cov.centers.size() == 1);
  CHECK(cov.centers[0][0] == 0.0);
  CHECK(cov.radii[0] == 0.5);
  CHECK(cov.overlap_bound == 1);
}

TEST_CASE("covering: dense-sample membership oracle, n = 1") {
  SpaceContext ctx(1, 5.0, 1e-8);
  CriticalCovering cov = build_critical_covering(ctx);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int q = 0; q < 10000; ++q) {
    Point p{u(rng)};
    bool inside = false;
    for (std::size_t k = 0; k < cov.centers.size() && !inside; ++k)
      inside = dist(p, cov.centers[k]) <= cov.radii[k] + 1e-12;
    REQUIRE(inside);
  }
  // centers sit just beyond the covering radius of a neighbor: the gap to
  // the nearest center stays within that neighbor's gamma plus a lattice step
  double lattice_step = critical_radius(Point{5.0}) / 8.0;
  for (std::size_t k = 1; k < cov.centers.size(); ++k) {
    double nearest = 1e300;
    std::size_t who = 0;
    for (std::size_t j = 0; j < cov.centers.size(); ++j)
      if (j != k) {
        double d = dist(cov.centers[k], cov.centers[j]);
        if (d < nearest) {
          nearest = d;
          who = j;
        }
      }
    double cap = std::max(critical_radius(cov.centers[k]),
                          critical_radius(cov.centers[who]));
    CHECK(nearest <= cap + lattice_step + 1e-12);
  }
}

TEST_CASE("covering: overlap bound computed pairwise, n = 2") {
  SpaceContext ctx(2, 3.0, 1e-8);
  CriticalCovering cov = build_critical_covering(ctx);
  REQUIRE(cov.overlap_bound >= 1);
  INFO("n=2 L=3 covering: " << cov.centers.size()
                            << " balls, overlap N = " << cov.overlap_bound);
  // independent recomputation of N by the quadrupled-ball intersection test
  int worst = 0;
  for (std::size_t k = 0; k < cov.centers.size(); ++k) {
    int cnt = 0;
    for (std::size_t j = 0; j < cov.centers.size(); ++j)
      if (dist(cov.centers[k], cov.centers[j]) <=
          4.0 * (cov.radii[k] + cov.radii[j]))
        ++cnt;
    worst = std::max(worst, cnt);
  }
  CHECK(worst == cov.overlap_bound);
  // sampled coverage
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int q = 0; q < 2000; ++q) {
    Point p{u(rng), u(rng)};
    bool inside = false;
    for (std::size_t k = 0; k < cov.centers.size() && !inside; ++k)
      inside = dist(p, cov.centers[k]) <= cov.radii[k] + 1e-12;
    REQUIRE(inside);
  }
}

TEST_CASE("ball families") {
  SpaceContext ctx(1, 4.0, 1e-8);
  std::vector<Point> centers{{-1.0}, {0.0}, {1.0}};

  auto crit = ball_family(ctx, BallKind::Critical, centers);
  REQUIRE(crit.size() == 3);
  for (const Ball& b : crit) CHECK(b.radius == 0.5);

  auto small = ball_family(ctx, BallKind::Small, std::span(centers).subspan(1, 1), 3);
  REQUIRE(small.size() == 3);
  CHECK_THAT(small[0].radius, WithinAbs(0.25, 1e-15));
  CHECK_THAT(small[1].radius, WithinAbs(0.125, 1e-15));
  CHECK_THAT(small[2].radius, WithinAbs(0.0625, 1e-15));

  auto large = ball_family(ctx, BallKind::Large, std::span(centers).subspan(1, 1));
  REQUIRE(large.size() == 4);
  CHECK_THAT(large[0].radius, WithinAbs(0.5, 1e-15));
  CHECK_THAT(large[1].radius, WithinAbs(1.0, 1e-15));
  CHECK_THAT(large[2].radius, WithinAbs(2.0, 1e-15));
  CHECK_THAT(large[3].radius, WithinAbs(4.0, 1e-15));
}

TEST_CASE("ball volume and membership") {
  Ball b(Point{0.0, 0.0}, 2.0);
  CHECK_THAT(b.volume(), WithinRel(4.0 * std::numbers::pi, 1e-14));
  CHECK(b.contains(Point{1.0, 1.0}));
  CHECK(!b.contains(Point{2.0, 1.0}));
  CHECK_THROWS_AS(Ball(Point{0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("space context validation") {
  CHECK_THROWS_AS(SpaceContext(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SpaceContext(1, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(SpaceContext(1, 1.0, 2.0), std::invalid_argument);
}
