#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hbmo/report_json.hpp"
#include "hbmo/verify.hpp"

using namespace hbmo;
using Catch::Matchers::WithinAbs;

TEST_CASE("size bound for the heat orbit kernel") {
  TimeGrid grid = TimeGrid::log_in_s(64, 1e-6, 1.0 - 1e-6);
  OrbitKernel K = heat_orbit_kernel(grid);
  SweepSpec sweep{4.0, 48};
  KernelBoundReport rep =
      verify_size_bound(K, "heat_orbit", 1.0 / 16, sweep, WeightForm::XForm);
  INFO("fitted_C = " << rep.fitted_C << " coarse " << rep.fitted_C_coarse);
  CHECK(rep.converged);
  CHECK(std::isfinite(rep.fitted_C));
  CHECK(rep.fitted_C > 0.0);
  CHECK(rep.eval_failures == 0);

  // the classical ratio (c = 0) dominates every positive-c ratio from above:
  // fitted_C is monotone in c at fixed sweep
  KernelBoundReport rep0 =
      verify_size_bound(K, "heat_orbit", 0.0, sweep, WeightForm::XForm);
  CHECK(rep0.fitted_C <= rep.fitted_C + 1e-12);

  // an over-aggressive exponent destroys convergence
  KernelBoundReport bad =
      verify_size_bound(K, "heat_orbit", 10.0, sweep, WeightForm::XForm);
  CHECK_FALSE(bad.converged);
}

TEST_CASE("smoothness bound for the heat orbit kernel") {
  TimeGrid grid = TimeGrid::log_in_s(64, 1e-6, 1.0 - 1e-6);
  OrbitKernel K = heat_orbit_kernel(grid);
  KernelBoundReport rep =
      verify_smoothness_bound(K, "heat_orbit", 0.0, SweepSpec{4.0, 48});
  INFO("fitted_C = " << rep.fitted_C);
  CHECK(rep.converged);
  CHECK(std::isfinite(rep.fitted_C));
  CHECK(rep.fitted_C > 0.0);
}

TEST_CASE("zero kernel yields zero everywhere") {
  OrbitKernel Z;
  Z.orbit_len = 4;
  Z.space = NormSpace::E;
  Z.eval = [](double, double, std::span<double> out) {
    for (double& v : out) v = 0.0;
  };
  KernelBoundReport rep =
      verify_size_bound(Z, "zero", 1.0 / 16, SweepSpec{4.0, 16},
                        WeightForm::XForm);
  CHECK(rep.fitted_C == 0.0);
  CHECK(rep.converged);
}

TEST_CASE("T1 conditions for the heat orbit") {
  SpaceContext ctx(1, 6.0, 1e-8);
  TimeGrid grid = TimeGrid::log_in_s(64, 1e-6, 1.0 - 1e-6);
  T1Options opt;
  opt.grid_points = 2049;
  T1Report rep =
      verify_t1_conditions(OperatorId::HeatOrbit, ctx, grid, NormSpace::E, opt);
  CHECK(rep.finite);
  CHECK_THAT(rep.cond_i_sup, WithinAbs(1.0, 1e-6));
  CHECK(rep.cond_ii_sup > 0.0);
  CHECK(rep.cond_ii_sup < 10.0);
}

TEST_CASE("T1 conditions for the g-function orbit") {
  SpaceContext ctx(1, 6.0, 1e-8);
  TimeGrid grid = TimeGrid::log_in_t(96, 1e-5, 8.0);
  T1Options opt;
  opt.grid_points = 1025;
  T1Report rep =
      verify_t1_conditions(OperatorId::GHeat, ctx, grid, NormSpace::F, opt);
  CHECK(rep.finite);
  CHECK(rep.cond_i_sup > 0.0);
  CHECK(rep.cond_i_sup < 5.0);
  CHECK(rep.cond_ii_sup < 5.0);
}

TEST_CASE("zero operator has vanishing T1 sups") {
  T1Field F;
  F.L = 2.0;
  F.m = 257;
  F.orbit_len = 8;
  F.data.assign(257 * 8, 0.0);
  F.space = NormSpace::E;
  T1Options opt;
  opt.center_half_width = 1.5;
  opt.centers = 7;
  T1Report rep = verify_t1_conditions(F, NormSpace::E, opt);
  CHECK(rep.cond_i_sup == 0.0);
  CHECK(rep.cond_ii_sup == 0.0);
  CHECK(rep.finite);
}

TEST_CASE("poisson action on one") {
  // P_t 1 -> 1 as t -> 0 and decays in t
  CHECK_THAT(poisson_action_on_one(1e-4, 0.0, 1), WithinAbs(1.0, 1e-3));
  double prev = 1.0;
  for (double t : {0.1, 0.5, 1.0, 2.0}) {
    double v = poisson_action_on_one(t, 1.0, 1);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
}

TEST_CASE("riesz T1 vanishes at the origin by symmetry") {
  SpaceContext ctx(1, 6.0, 1e-8);
  TimeGrid grid = TimeGrid::log_in_s(8, 0.1, 0.9);
  T1Options opt;
  opt.grid_points = 129;
  opt.grid_half_width = 0.64;
  opt.centers = 3;
  opt.center_half_width = 0.1;
  opt.riesz_int_step = 0.02;
  T1Field F = compute_T1(OperatorId::Riesz, ctx, grid, opt);
  int mid = (F.m - 1) / 2;
  CHECK(F.coord(mid) == 0.0);
  CHECK_THAT(F.data[mid], WithinAbs(0.0, 1e-6));
}

TEST_CASE("report assembly is deterministic") {
  TimeGrid grid = TimeGrid::log_in_s(16, 1e-4, 0.99);
  OrbitKernel K = heat_orbit_kernel(grid);
  KernelBoundReport rep =
      verify_size_bound(K, "heat_orbit", 0.0625, SweepSpec{3.0, 16},
                        WeightForm::YForm);
  SpaceContext ctx(1, 6.0, 1e-8);
  T1Options opt;
  opt.grid_points = 257;
  T1Report t1 =
      verify_t1_conditions(OperatorId::HeatOrbit, ctx, grid, NormSpace::E, opt);

  std::vector<KernelBoundReport> bounds{rep};
  std::vector<T1Report> t1s{t1};
  VerificationSummary a = assemble_report(bounds, t1s);
  VerificationSummary b = assemble_report(bounds, t1s);
  CHECK(a.dump() == b.dump());
  CHECK(a.all_ok());

  VerificationSummary empty = assemble_report({}, {});
  CHECK(empty.all_ok());
  CHECK(empty.body["kernel_bounds"].empty());
}
