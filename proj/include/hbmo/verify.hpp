#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hbmo/bmo.hpp"
#include "hbmo/errors.hpp"
#include "hbmo/geometry.hpp"
#include "hbmo/mehler.hpp"
#include "hbmo/operators.hpp"
#include "hbmo/parallel.hpp"
#include "hbmo/riesz.hpp"
#include "hbmo/time_grid.hpp"
#include "hbmo/variation.hpp"

namespace hbmo {

enum class NormSpace { Scalar, E, F, ERho };

inline std::string to_string(NormSpace s) {
  switch (s) {
    case NormSpace::Scalar: return "scalar";
    case NormSpace::E: return "E";
    case NormSpace::F: return "F";
    case NormSpace::ERho: return "E_rho";
  }
  return "?";
}

// Kernel evaluated as an orbit over a time grid (length 1 for scalar
// kernels) together with the Banach norm taken on orbits.
struct OrbitKernel {
  std::function<void(double, double, std::span<double>)> eval;
  std::size_t orbit_len = 1;
  NormSpace space = NormSpace::Scalar;
  std::vector<double> f_weights;  // log-t trapezoid weights, F norm only
  double rho = 3.0;

  double norm(std::span<const double> orbit) const {
    switch (space) {
      case NormSpace::Scalar:
        return std::fabs(orbit[0]);
      case NormSpace::E: {
        double m = 0.0;
        for (double v : orbit) m = std::max(m, std::fabs(v));
        return m;
      }
      case NormSpace::F: {
        double acc = 0.0;
        for (std::size_t j = 0; j < orbit.size(); ++j)
          acc += f_weights[j] * orbit[j] * orbit[j];
        return std::sqrt(acc);
      }
      case NormSpace::ERho:
        return variation_operator(orbit, rho);
    }
    return 0.0;
  }
};

// ---- kernel factories (one space dimension) ----

// Heat orbit (W_{t(s_j)}(x,y))_j with the sup norm.
inline OrbitKernel heat_orbit_kernel(const TimeGrid& grid) {
  OrbitKernel K;
  K.orbit_len = grid.size();
  K.space = NormSpace::E;
  std::vector<double> s = grid.s_values;
  K.eval = [s](double x, double y, std::span<double> out) {
    for (std::size_t j = 0; j < s.size(); ++j)
      out[j] = detail::heat1d(s[j], x, y);
  };
  return K;
}

// Same orbit with the rho-variation norm.
inline OrbitKernel heat_variation_kernel(const TimeGrid& grid, double rho) {
  OrbitKernel K = heat_orbit_kernel(grid);
  K.space = NormSpace::ERho;
  K.rho = rho;
  return K;
}

// g-function kernel (t d/dt W_t(x,y))_t in the L^2(dt/t) norm, via
// t d/dt = t (1-s^2) d/ds.
inline OrbitKernel g_heat_kernel(const TimeGrid& grid) {
  OrbitKernel K;
  K.orbit_len = grid.size();
  K.space = NormSpace::F;
  K.f_weights = logt_trapezoid_weights(grid.times());
  std::vector<double> s = grid.s_values;
  std::vector<double> t = grid.times();
  K.eval = [s, t](double x, double y, std::span<double> out) {
    for (std::size_t j = 0; j < s.size(); ++j)
      out[j] =
          t[j] * (1.0 - s[j] * s[j]) * detail::heat1d_ds(s[j], x, y);
  };
  return K;
}

// Scalar Riesz kernel through the adaptive quadrature route.
inline OrbitKernel riesz_scalar_kernel(RieszQuadPolicy policy = {}) {
  OrbitKernel K;
  K.orbit_len = 1;
  K.space = NormSpace::Scalar;
  K.eval = [policy](double x, double y, std::span<double> out) {
    std::array<double, 1> xv{x}, yv{y};
    out[0] = riesz_kernel(1, xv, yv, policy);
  };
  return K;
}

// ---- kernel bound sweeps ----

enum class WeightForm { XForm, YForm, None };

inline std::string to_string(WeightForm w) {
  switch (w) {
    case WeightForm::XForm: return "x";
    case WeightForm::YForm: return "y";
    case WeightForm::None: return "none";
  }
  return "?";
}

struct SweepSpec {
  double half_width = 6.0;
  int points = 128;
};

struct KernelBoundReport {
  std::string operator_id;
  std::string bound_id;  // "size" or "smoothness"
  double c_used = 0.0;
  std::string weight_form = "none";
  double fitted_C = 0.0;         // finer sweep
  double fitted_C_coarse = 0.0;  // half-density sweep
  std::array<double, 3> worst_pair{0.0, 0.0, 0.0};
  bool has_z = false;
  std::size_t sweep_size = 0;
  std::size_t eval_failures = 0;
  bool converged = false;
  double sweep_half_width = 0.0;
  int sweep_points = 0;
  std::size_t orbit_len = 1;
  std::string norm_space = "scalar";
  double rho = 0.0;
};

namespace detail {

struct SweepMax {
  double value = 0.0;
  std::array<double, 3> arg{0.0, 0.0, 0.0};
  std::size_t failures = 0;
  std::size_t count = 0;
};

// max over lattice pairs of ratio(x, y); merge order fixed by chunking
template <class Ratio>
SweepMax pair_sweep(double X, int pts, Ratio&& ratio) {
  std::vector<double> lat(pts);
  for (int i = 0; i < pts; ++i)
    lat[i] = -X + 2.0 * X * i / (pts - 1);
  return parallel_reduce<SweepMax>(
      static_cast<std::size_t>(pts) * pts, SweepMax{},
      [&](SweepMax& acc, std::size_t q) {
        int i = static_cast<int>(q / pts), j = static_cast<int>(q % pts);
        if (i == j) return;
        ++acc.count;
        double r;
        try {
          r = ratio(lat[i], lat[j]);
        } catch (const std::exception&) {
          ++acc.failures;
          return;
        }
        if (r > acc.value) {
          acc.value = r;
          acc.arg = {lat[i], lat[j], 0.0};
        }
      },
      [](SweepMax& a, const SweepMax& b) {
        a.count += b.count;
        a.failures += b.failures;
        if (b.value > a.value) {
          a.value = b.value;
          a.arg = b.arg;
        }
      });
}

inline double gauss_weight(double c, WeightForm form, double x, double y) {
  if (form == WeightForm::None || c == 0.0) return 1.0;
  double d = std::fabs(x - y);
  double w = form == WeightForm::XForm ? std::fabs(x) : std::fabs(y);
  return std::exp(c * (w * d + d * d));
}

}  // namespace detail

// fitted_C = sup over the pair lattice of
//   ||K(x,y)||_X |x-y|^n e^{+c [w |x-y| + |x-y|^2]},  w = |x| or |y|.
// Convergence: the half-density sweep must agree within 5%.
inline KernelBoundReport verify_size_bound(const OrbitKernel& K,
                                           const std::string& operator_id,
                                           double c, SweepSpec sweep,
                                           WeightForm form) {
  auto run = [&](int pts) {
    return detail::pair_sweep(sweep.half_width, pts, [&](double x, double y) {
      std::vector<double> orbit(K.orbit_len);
      K.eval(x, y, orbit);
      double d = std::fabs(x - y);
      return K.norm(orbit) * d * detail::gauss_weight(c, form, x, y);
    });
  };
  detail::SweepMax coarse = run((sweep.points + 1) / 2);
  detail::SweepMax fine = run(sweep.points);
  KernelBoundReport rep;
  rep.operator_id = operator_id;
  rep.bound_id = "size";
  rep.c_used = c;
  rep.weight_form = to_string(form);
  rep.fitted_C = fine.value;
  rep.fitted_C_coarse = coarse.value;
  rep.worst_pair = fine.arg;
  rep.sweep_size = fine.count;
  rep.eval_failures = fine.failures + coarse.failures;
  rep.converged = std::isfinite(fine.value) &&
                  std::fabs(fine.value - coarse.value) <=
                      0.05 * std::max(fine.value, 1e-300);
  rep.sweep_half_width = sweep.half_width;
  rep.sweep_points = sweep.points;
  rep.orbit_len = K.orbit_len;
  rep.norm_space = to_string(K.space);
  rep.rho = K.space == NormSpace::ERho ? K.rho : 0.0;
  return rep;
}

// fitted_C = sup over triples |x-y| > 2|y-z| of
//   (||K(x,y)-K(x,z)|| + ||K(y,x)-K(z,x)||) |x-y|^{n+1} / |y-z|
// times the optional Gaussian weight (used by the Riesz smoothness form).
inline KernelBoundReport verify_smoothness_bound(const OrbitKernel& K,
                                                 const std::string& operator_id,
                                                 double c, SweepSpec sweep,
                                                 WeightForm form =
                                                     WeightForm::None) {
  auto run = [&](int pts) {
    return detail::pair_sweep(sweep.half_width, pts, [&](double x, double y) {
      double best = 0.0;
      std::vector<double> kxy(K.orbit_len), kxz(K.orbit_len),
          kyx(K.orbit_len), kzx(K.orbit_len), diff(K.orbit_len);
      for (double frac : {0.25, 0.125}) {
        double z = y + frac * (x - y);
        K.eval(x, y, kxy);
        K.eval(x, z, kxz);
        K.eval(y, x, kyx);
        K.eval(z, x, kzx);
        for (std::size_t q = 0; q < K.orbit_len; ++q)
          diff[q] = kxy[q] - kxz[q];
        double num = K.norm(diff);
        for (std::size_t q = 0; q < K.orbit_len; ++q)
          diff[q] = kyx[q] - kzx[q];
        num += K.norm(diff);
        double dxy = std::fabs(x - y), dyz = std::fabs(y - z);
        double r = num * dxy * dxy / dyz * detail::gauss_weight(c, form, x, y);
        best = std::max(best, r);
      }
      return best;
    });
  };
  detail::SweepMax coarse = run((sweep.points + 1) / 2);
  detail::SweepMax fine = run(sweep.points);
  KernelBoundReport rep;
  rep.operator_id = operator_id;
  rep.bound_id = "smoothness";
  rep.c_used = c;
  rep.weight_form = to_string(form);
  rep.fitted_C = fine.value;
  rep.fitted_C_coarse = coarse.value;
  rep.worst_pair = fine.arg;
  rep.has_z = true;
  rep.sweep_size = fine.count;
  rep.eval_failures = fine.failures + coarse.failures;
  rep.converged = std::isfinite(fine.value) &&
                  std::fabs(fine.value - coarse.value) <=
                      0.05 * std::max(fine.value, 1e-300);
  rep.sweep_half_width = sweep.half_width;
  rep.sweep_points = sweep.points;
  rep.orbit_len = K.orbit_len;
  rep.norm_space = to_string(K.space);
  rep.rho = K.space == NormSpace::ERho ? K.rho : 0.0;
  return rep;
}

// ---- T1 fields and conditions ----

enum class OperatorId {
  HeatOrbit,
  PoissonOrbit,
  GHeat,
  Riesz,
  RieszTruncations,
  HeatVariation
};

inline std::string to_string(OperatorId id) {
  switch (id) {
    case OperatorId::HeatOrbit: return "heat_orbit";
    case OperatorId::PoissonOrbit: return "poisson_orbit";
    case OperatorId::GHeat: return "g_heat";
    case OperatorId::Riesz: return "riesz(1)";
    case OperatorId::RieszTruncations: return "riesz_truncations(1)";
    case OperatorId::HeatVariation: return "heat_variation";
  }
  return "?";
}

inline NormSpace default_space(OperatorId id) {
  switch (id) {
    case OperatorId::HeatOrbit: return NormSpace::E;
    case OperatorId::PoissonOrbit: return NormSpace::E;
    case OperatorId::GHeat: return NormSpace::F;
    case OperatorId::Riesz: return NormSpace::Scalar;
    case OperatorId::RieszTruncations: return NormSpace::ERho;
    case OperatorId::HeatVariation: return NormSpace::ERho;
  }
  return NormSpace::Scalar;
}

struct T1Options {
  double grid_half_width = 6.5;
  int grid_points = 1025;
  double center_half_width = 6.0;
  int centers = 49;
  int j_small_max = 8;
  double riesz_int_step = 0.01;  // PV integration grid step
  std::vector<double> eps_grid;  // truncation radii; default geometric
  double rho = 3.0;
  double quad_tol = 1e-10;
};

// T1 sampled on a fine one-dimensional grid; each sample is an orbit.
struct T1Field {
  double L = 0.0;
  int m = 0;
  std::size_t orbit_len = 1;
  std::vector<double> data;  // m rows of orbit_len
  NormSpace space = NormSpace::Scalar;
  std::vector<double> f_weights;
  double rho = 3.0;
  OperatorId id = OperatorId::HeatOrbit;

  double coord(int i) const { return -L + 2.0 * L * i / (m - 1); }
  std::span<const double> orbit(int i) const {
    return {data.data() + static_cast<std::size_t>(i) * orbit_len, orbit_len};
  }
};

// Poisson semigroup acting on 1 by subordination of the closed-form mass.
inline double poisson_action_on_one(double t, double xnorm2, int n,
                                    double abs_tol = 1e-11) {
  if (!(t > 0.0)) throw std::domain_error("poisson_action_on_one: t > 0");
  const double tau_max = 19.0;
  double v_lo = t / (2.0 * std::sqrt(tau_max));
  auto f = [&](double v) {
    double tau = t * t / (4.0 * v * v);
    double s = std::min(std::tanh(tau), std::nextafter(1.0, 0.0));
    return std::exp(-v * v) * heat_action_on_one(MedaParam(s), xnorm2, n);
  };
  QuadResult q = adaptive_quadrature(f, v_lo, 6.5, abs_tol);
  return 2.0 / std::sqrt(std::numbers::pi) * q.value;
}

namespace detail {

// PV and truncation machinery for Riesz T1 on a centered fine grid:
// rings y = x +- d*h_i; returns ring contributions ring[d-1].
inline void riesz_t1_rings(double x, double h,
                           const std::vector<RieszDiagonalRule>& rules,
                           std::vector<double>& ring) {
  const int window = static_cast<int>(rules.size());
  ring.assign(window, 0.0);
  for (int d = 1; d <= window; ++d) {
    // left neighbor y = x - d h (b = +dh), right neighbor (b = -dh)
    double left = rules[d - 1](2.0 * x - d * h);
    double right = rules[d - 1].mirrored(2.0 * x + d * h);
    ring[d - 1] = (left + right) * h;
  }
}

inline std::vector<RieszDiagonalRule> riesz_rule_table(double h, int window) {
  std::vector<RieszDiagonalRule> rules;
  rules.reserve(window);
  for (int d = 1; d <= window; ++d) rules.emplace_back(d * h);
  return rules;
}

}  // namespace detail

inline T1Field compute_T1(OperatorId id, const SpaceContext& ctx,
                          const TimeGrid& grid, const T1Options& opt = {}) {
  if (ctx.n != 1)
    throw std::invalid_argument("compute_T1: implemented for n = 1");
  T1Field F;
  F.L = opt.grid_half_width;
  F.m = opt.grid_points;
  F.id = id;
  F.space = default_space(id);
  F.rho = opt.rho;
  const std::size_t K = grid.size();

  switch (id) {
    case OperatorId::HeatOrbit:
    case OperatorId::HeatVariation: {
      F.orbit_len = K;
      F.data.resize(static_cast<std::size_t>(F.m) * K);
      for (int i = 0; i < F.m; ++i) {
        double y = F.coord(i);
        for (std::size_t j = 0; j < K; ++j)
          F.data[i * K + j] =
              heat_action_on_one(MedaParam(grid.s_values[j]), y * y, 1);
      }
      break;
    }
    case OperatorId::PoissonOrbit: {
      F.orbit_len = K;
      F.data.resize(static_cast<std::size_t>(F.m) * K);
      std::vector<double> t = grid.times();
      parallel_for(F.m, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          double y = F.coord(static_cast<int>(i));
          for (std::size_t j = 0; j < K; ++j)
            F.data[i * K + j] =
                poisson_action_on_one(t[j], y * y, 1, opt.quad_tol);
        }
      });
      break;
    }
    case OperatorId::GHeat: {
      F.orbit_len = K;
      F.data.resize(static_cast<std::size_t>(F.m) * K);
      F.f_weights = logt_trapezoid_weights(grid.times());
      std::vector<double> t = grid.times();
      for (int i = 0; i < F.m; ++i) {
        double y = F.coord(i);
        for (std::size_t j = 0; j < K; ++j) {
          double s = grid.s_values[j];
          F.data[i * K + j] = t[j] * (1.0 - s * s) *
                              heat_action_on_one_ds(MedaParam(s), y * y, 1);
        }
      }
      break;
    }
    case OperatorId::Riesz: {
      F.orbit_len = 1;
      F.data.resize(F.m);
      const double h = opt.riesz_int_step;
      const int window = static_cast<int>(std::ceil(16.0 / h));
      auto rules = detail::riesz_rule_table(h, window);
      parallel_for(F.m, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> ring;
        for (std::size_t i = lo; i < hi; ++i) {
          double x = F.coord(static_cast<int>(i));
          detail::riesz_t1_rings(x, h, rules, ring);
          // partial sums for dmin = 3 and dmin = 5, then extrapolate the
          // excision radius (effective (dmin - 1/2) h) to zero
          double f2 = 0.0, f4 = 0.0;
          for (int d = window; d >= 5; --d) f4 += ring[d - 1];
          f2 = f4 + ring[3] + ring[2];
          double e1 = 2.5 * h, e2 = 4.5 * h;
          F.data[i] = (e2 * f2 - e1 * f4) / (e2 - e1);
        }
      });
      break;
    }
    case OperatorId::RieszTruncations: {
      std::vector<double> eps = opt.eps_grid;
      if (eps.empty()) {
        // geometric from 2 down to 8 * integration step
        double e = 0.98;
        while (e >= 8.0 * opt.riesz_int_step) {
          eps.push_back(e);
          e *= 0.75;
        }
      }
      F.orbit_len = eps.size();
      F.data.resize(static_cast<std::size_t>(F.m) * eps.size());
      const double h = opt.riesz_int_step;
      const int window = static_cast<int>(std::ceil(16.0 / h));
      auto rules = detail::riesz_rule_table(h, window);
      parallel_for(F.m, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> ring;
        for (std::size_t i = lo; i < hi; ++i) {
          double x = F.coord(static_cast<int>(i));
          detail::riesz_t1_rings(x, h, rules, ring);
          double acc = 0.0;
          int d = window;
          for (std::size_t j = 0; j < eps.size(); ++j) {
            int dmin = detail::ring_min(eps[j], h);
            for (; d >= dmin; --d) acc += ring[d - 1];
            F.data[i * eps.size() + j] = acc;
          }
        }
      });
      break;
    }
  }
  return F;
}

struct T1Report {
  std::string operator_id;
  std::string norm_space;
  double cond_i_sup = 0.0;
  double cond_ii_sup = 0.0;
  double worst_i_center = 0.0;
  double worst_ii_center = 0.0;
  double worst_ii_radius = 0.0;
  std::size_t centers_used = 0;
  std::size_t balls_skipped = 0;
  bool finite = false;
  std::size_t orbit_len = 1;
  double rho = 0.0;
  int grid_points = 0;
  double grid_half_width = 0.0;
};

// Theorem-style T1 conditions over the critical-ball sweep:
//   (i)  sup_x  mean over B(x, gamma(x)) of ||T1(y)||_X,
//   (ii) sup_{x, s <= gamma(x)} (1 + log(gamma/s)) * mean over B(x,s) of
//        ||T1(y) - (T1)_B||_X, the centering taken componentwise.
inline T1Report verify_t1_conditions(const T1Field& F, NormSpace space,
                                     const T1Options& opt = {}) {
  OrbitKernel normer;
  normer.orbit_len = F.orbit_len;
  normer.space = space;
  normer.f_weights = F.f_weights;
  normer.rho = opt.rho;

  T1Report rep;
  rep.operator_id = to_string(F.id);
  rep.norm_space = to_string(space);
  rep.orbit_len = F.orbit_len;
  rep.rho = space == NormSpace::ERho ? opt.rho : 0.0;
  rep.grid_points = F.m;
  rep.grid_half_width = F.L;

  const double hv = 2.0 * F.L / (F.m - 1);
  const std::size_t K = F.orbit_len;
  std::vector<double> centers(opt.centers);
  for (int i = 0; i < opt.centers; ++i)
    centers[i] = -opt.center_half_width +
                 2.0 * opt.center_half_width * i / (opt.centers - 1);

  std::vector<double> cmean(K), diff(K);
  for (double x : centers) {
    double gam = critical_radius_from_norm(std::fabs(x));
    for (int j = 0; j <= opt.j_small_max; ++j) {
      double rad = gam * std::pow(2.0, -j);
      int lo = static_cast<int>(std::ceil((x - rad + F.L) / hv - 1e-12));
      int hi = static_cast<int>(std::floor((x + rad + F.L) / hv + 1e-12));
      lo = std::max(lo, 0);
      hi = std::min(hi, F.m - 1);
      std::size_t cnt = hi >= lo ? static_cast<std::size_t>(hi - lo + 1) : 0;
      if (cnt < 2) {
        ++rep.balls_skipped;
        continue;
      }
      auto weight_of = [&](int p) { return p == lo || p == hi ? 0.5 : 1.0; };
      const double wsum = static_cast<double>(cnt) - 1.0;
      if (j == 0) {
        // condition (i) on the critical ball
        double acc = 0.0;
        for (int p = lo; p <= hi; ++p)
          acc += weight_of(p) * normer.norm(F.orbit(p));
        acc /= wsum;
        if (acc > rep.cond_i_sup) {
          rep.cond_i_sup = acc;
          rep.worst_i_center = x;
        }
        ++rep.centers_used;
      }
      // condition (ii) with weight 1 + log(gamma/s)
      std::fill(cmean.begin(), cmean.end(), 0.0);
      for (int p = lo; p <= hi; ++p) {
        std::span<const double> orb = F.orbit(p);
        double wp = weight_of(p);
        for (std::size_t q = 0; q < K; ++q) cmean[q] += wp * orb[q];
      }
      for (std::size_t q = 0; q < K; ++q) cmean[q] /= wsum;
      double acc = 0.0;
      for (int p = lo; p <= hi; ++p) {
        std::span<const double> orb = F.orbit(p);
        for (std::size_t q = 0; q < K; ++q) diff[q] = orb[q] - cmean[q];
        acc += weight_of(p) * normer.norm(diff);
      }
      acc /= wsum;
      double val = (1.0 + std::log(gam / rad)) * acc;
      if (val > rep.cond_ii_sup) {
        rep.cond_ii_sup = val;
        rep.worst_ii_center = x;
        rep.worst_ii_radius = rad;
      }
    }
  }
  rep.finite = std::isfinite(rep.cond_i_sup) && std::isfinite(rep.cond_ii_sup);
  return rep;
}

inline T1Report verify_t1_conditions(OperatorId id, const SpaceContext& ctx,
                                     const TimeGrid& grid, NormSpace space,
                                     const T1Options& opt = {}) {
  return verify_t1_conditions(compute_T1(id, ctx, grid, opt), space, opt);
}

}  // namespace hbmo
