#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "hbmo/variation.hpp"

using namespace hbmo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Independent oracle: enumerate every subsequence, accumulating the rho-th
// powers right to left exactly as the dynamic program does.
double exhaustive_variation_pow(const std::vector<double>& v, double rho) {
  const std::size_t m = v.size();
  double best = 0.0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    double acc = 0.0;
    int last = -1;
    for (int i = static_cast<int>(m) - 1; i >= 0; --i) {
      if (!(mask >> i & 1)) continue;
      if (last >= 0) acc = std::pow(std::fabs(v[i] - v[last]), rho) + acc;
      last = i;
    }
    if (acc > best) best = acc;
  }
  return best;
}

}  // namespace

TEST_CASE("variation operator examples") {
  CHECK(variation_operator(std::vector<double>{2.0, 2.0, 2.0}, 3.0) == 0.0);
  CHECK_THAT(variation_operator(std::vector<double>{0.0, 1.0, 0.0}, 3.0),
             WithinRel(1.2599210498948732, 1e-14));
  // monotone data: endpoints only (|3-0|^3 = 27 beats 8 + 1)
  CHECK_THAT(variation_operator(std::vector<double>{3.0, 1.0, 0.0}, 3.0),
             WithinRel(3.0, 1e-14));
  CHECK_THROWS_AS(variation_operator(std::vector<double>{1.0}, 2.0),
                  std::domain_error);
}

TEST_CASE("dynamic program equals exhaustive enumeration") {
  std::mt19937_64 rng(20240520);
  std::uniform_real_distribution<double> uval(-2.0, 2.0);
  std::uniform_int_distribution<int> ulen(1, 12);
  std::uniform_real_distribution<double> urho(2.1, 6.0);
  for (int trial = 0; trial < 500; ++trial) {
    int m = ulen(rng);
    std::vector<double> v(m);
    for (double& x : v) x = uval(rng);
    double rho = urho(rng);
    double oracle_pow = exhaustive_variation_pow(v, rho);
    double dp_pow = variation_operator_pow(v, rho);
    // the powered sums must agree bit-for-bit, the roots to 1e-12
    CHECK(dp_pow == oracle_pow);
    CHECK_THAT(variation_operator(v, rho),
               WithinAbs(std::pow(oracle_pow, 1.0 / rho), 1e-12));
  }
}

TEST_CASE("monotone orbits: variation is first minus last") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(20);
    double cur = 5.0;
    for (double& x : v) {
      cur -= u(rng);
      x = cur;
    }
    double expect = std::fabs(v.front() - v.back());
    CHECK_THAT(variation_operator(v, 3.0), WithinRel(expect, 1e-13));
  }
}

TEST_CASE("rho monotonicity and the crude sup bound") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(16);
  for (double& x : v) x = u(rng);
  double prev = 1e300;
  double e = 0.0;
  for (double x : v) e = std::max(e, std::fabs(x));
  for (double rho : {2.5, 3.0, 4.0, 6.0, 10.0}) {
    double val = variation_operator(v, rho);
    CHECK(val <= prev + 1e-12);
    CHECK(val <= 2.0 * std::pow(double(v.size()), 1.0 / rho) * e + 1e-12);
    prev = val;
  }
}

TEST_CASE("orbit norms") {
  std::vector<double> one{0.7};
  OrbitNorms n1 = orbit_norms(one, {}, {}, 3.0);
  CHECK(n1.e_norm == 0.7);
  CHECK(n1.e_rho_norm == 0.0);

  std::vector<double> two{1.0, 0.0};
  OrbitNorms n2 = orbit_norms(two, {}, {}, 3.0);
  CHECK(n2.e_norm == 1.0);
  CHECK_THAT(n2.e_rho_norm, WithinRel(1.0, 1e-14));
  for (double rho : {2.5, 4.0, 9.0})
    CHECK_THAT(orbit_norms(two, {}, {}, rho).e_rho_norm, WithinRel(1.0, 1e-14));

  // F-norm with explicit weights
  std::vector<double> d{2.0, 1.0};
  std::vector<double> w{0.5, 0.25};
  OrbitNorms n3 = orbit_norms(two, d, w, 3.0);
  CHECK_THAT(n3.f_norm, WithinRel(std::sqrt(0.5 * 4.0 + 0.25 * 1.0), 1e-14));
}

TEST_CASE("log-t trapezoid weights") {
  std::vector<double> t{4.0, 2.0, 1.0};  // decreasing, log steps log 2
  auto w = logt_trapezoid_weights(t);
  double l2 = std::log(2.0);
  CHECK_THAT(w[0], WithinRel(0.5 * l2, 1e-14));
  CHECK_THAT(w[1], WithinRel(l2, 1e-14));
  CHECK_THAT(w[2], WithinRel(0.5 * l2, 1e-14));
}
