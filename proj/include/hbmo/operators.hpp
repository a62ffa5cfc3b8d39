#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "hbmo/errors.hpp"
#include "hbmo/grid_function.hpp"
#include "hbmo/mehler.hpp"
#include "hbmo/parallel.hpp"
#include "hbmo/quadrature.hpp"
#include "hbmo/riesz.hpp"
#include "hbmo/time_grid.hpp"
#include "hbmo/variation.hpp"

namespace hbmo {

// How the integral over R^n \ box is handled. ConstantExtension continues f
// by its boundary sample along each axis and adds the closed-form Gaussian
// tail mass; Zero integrates over the box only.
enum class TailPolicy { Zero, ConstantExtension };

struct ApplyOptions {
  TailPolicy tail = TailPolicy::ConstantExtension;
  // When finite: bound the kernel mass outside the box times max|f| and
  // throw AccuracyError if it exceeds this (the box-truncation gauge).
  double max_truncation = std::numeric_limits<double>::infinity();
};

namespace detail {

using ld = long double;

// Smallest s whose kernel width sqrt(2s/(1+s^2)) is resolved by step h.
inline bool heat_resolved(double s, double h) {
  double sigma2 = 2.0 * s / (1.0 + s * s);
  double need = 2.5 * h;
  return sigma2 >= need * need;
}

inline double min_resolved_s(double h) {
  // solve 2s/(1+s^2) = (2.5 h)^2 for the small root
  double c = 2.5 * h * 2.5 * h;
  double disc = 1.0 - c * c;
  if (disc <= 0.0) return 1.0;
  return c / (1.0 + std::sqrt(disc));
}

// One output row of the 1-d heat sweep. Interior rows with a resolved,
// box-contained kernel are plain trapezoid rows (spectrally accurate for the
// smooth decaying integrands). Rows whose kernel is narrower than the grid
// or whose Gaussian mass touches the box edge integrate the piecewise-linear
// interpolant cell by cell via truncated-Gaussian moments instead; that
// keeps the constant-function action exact up to the erf evaluations. All
// arithmetic is long double: the spectral identities are verified at
// relative 1e-6 against orbit values as small as e^{-25}, which double
// accumulation cannot reach.
inline void fill_heat_row(int m, double L, double h, double s,
                          TailPolicy tail, int i, ld* row, ld& tl, ld& tr) {
  const ld lh = h, lL = L, ls = s;
  const ld xi = -lL + static_cast<ld>(i) * lh;
  auto g = heat1d_gauss<ld>(ls, xi);
  const ld sqrt2 = std::sqrt(2.0L);
  const ld zl = (-lL - g.mu) / g.sigma;
  const ld zr = (lL - g.mu) / g.sigma;
  const ld Phi_l = erfc_ld(-zl / sqrt2) / 2;
  const ld Phi_r_c = erfc_ld(zr / sqrt2) / 2;  // 1 - Phi(zr)
  tl = tr = 0.0L;
  if (tail == TailPolicy::ConstantExtension) {
    tl = g.mass * Phi_l;
    tr = g.mass * Phi_r_c;
  }
  const bool resolved = heat_resolved(s, h);
  const bool edged = Phi_l + Phi_r_c > 1e-13L;
  if (resolved && !edged) {
    for (int j = 0; j < m; ++j) {
      ld yj = -lL + static_cast<ld>(j) * lh;
      ld w = (j == 0 || j == m - 1) ? lh / 2 : lh;
      row[j] = w * heat1d<ld>(ls, xi, yj);
    }
    return;
  }
  for (int j = 0; j < m; ++j) row[j] = 0.0L;
  const ld inv_sqrt2pi = 1.0L / std::sqrt(2.0L * std::numbers::pi_v<ld>);
  int j0 = std::max(
      0, (int)std::floor((double)((g.mu - 8.5L * g.sigma + lL) / lh)));
  int j1 = std::min(
      m - 1, (int)std::ceil((double)((g.mu + 8.5L * g.sigma + lL) / lh)));
  if (j1 <= j0) return;
  ld zj = (-lL + j0 * lh - g.mu) / g.sigma;
  ld Phi_j = erfc_ld(-zj / sqrt2) / 2;
  ld phi_j = inv_sqrt2pi * std::exp(-zj * zj / 2);
  for (int j = j0; j < j1; ++j) {
    ld yj = -lL + j * lh;
    ld zn = (yj + lh - g.mu) / g.sigma;
    ld Phi_n = erfc_ld(-zn / sqrt2) / 2;
    ld phi_n = inv_sqrt2pi * std::exp(-zn * zn / 2);
    ld dPhi = Phi_n - Phi_j;
    ld M0 = g.mass * dPhi;
    ld M1 = g.mass * (g.mu * dPhi + g.sigma * (phi_j - phi_n));
    ld lin = (M1 - yj * M0) / lh;  // weight of the forward sample
    row[j] += M0 - lin;
    row[j + 1] += lin;
    Phi_j = Phi_n;
    phi_j = phi_n;
  }
}

struct HeatAxisKernel {
  int m = 0;
  double L = 0.0, h = 0.0, s = 0.0;
  TailPolicy tail = TailPolicy::Zero;
  bool store = false;       // dense matrix kept only when rows are reused
  std::vector<ld> M;        // m*m when store
  std::vector<ld> TL, TR;   // boundary tail coefficients per output node
};

inline HeatAxisKernel build_heat_axis_kernel(int m, double L, double s,
                                             TailPolicy tail, bool store) {
  HeatAxisKernel K;
  K.m = m;
  K.L = L;
  K.h = 2.0 * L / (m - 1);
  K.s = s;
  K.tail = tail;
  K.store = store;
  if (!store) return K;  // rows generated on the fly during the sweep
  K.M.assign(static_cast<std::size_t>(m) * m, 0.0L);
  K.TL.assign(m, 0.0L);
  K.TR.assign(m, 0.0L);
  parallel_for(m, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      fill_heat_row(m, L, K.h, s, tail, static_cast<int>(i), &K.M[i * m],
                    K.TL[i], K.TR[i]);
  });
  return K;
}

// Double-precision pair of sweep matrices sharing one exp evaluation per
// entry: the plain kernel and its s-derivative (the derivative consumers run
// at grid-quadrature tolerances, so doubles suffice there).
struct HeatDsAxisKernels {
  int m = 0;
  double L = 0.0, h = 0.0, s = 0.0;
  TailPolicy tail = TailPolicy::Zero;
  std::vector<double> M, Mds;
  std::vector<double> TL, TR, TLds, TRds;
};

inline HeatDsAxisKernels build_heat_ds_axis_kernels(int m, double L, double s,
                                                    TailPolicy tail,
                                                    bool want_std) {
  HeatDsAxisKernels K;
  K.m = m;
  K.L = L;
  K.h = 2.0 * L / (m - 1);
  K.s = s;
  K.tail = tail;
  if (!heat_resolved(s, K.h))
    throw ResolutionError(
        "heat derivative sweep: s below grid resolution — refine the grid or "
        "drop this time node");
  if (want_std) K.M.assign(static_cast<std::size_t>(m) * m, 0.0);
  K.Mds.assign(static_cast<std::size_t>(m) * m, 0.0);
  K.TL.assign(m, 0.0);
  K.TR.assign(m, 0.0);
  K.TLds.assign(m, 0.0);
  K.TRds.assign(m, 0.0);
  parallel_for(m, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double xi = -L + i * K.h;
      for (int j = 0; j < m; ++j) {
        double yj = -L + j * K.h;
        double w = (j == 0 || j == m - 1) ? K.h / 2 : K.h;
        double ker = heat1d<double>(s, xi, yj);
        double a = xi + yj, b = xi - yj;
        double logder =
            -s / (1.0 - s * s) - 1.0 / (2.0 * s) - (a * a - b * b / (s * s)) / 4.0;
        if (want_std) K.M[i * m + j] = w * ker;
        K.Mds[i * m + j] = w * ker * logder;
      }
      if (tail == TailPolicy::ConstantExtension) {
        MedaParam p(s);
        K.TL[i] = heat_tail_mass_left(p, xi, L);
        K.TR[i] = heat_tail_mass_right(p, xi, L);
        K.TLds[i] = heat_tail_mass_left_ds(p, xi, L);
        K.TRds[i] = heat_tail_mass_right_ds(p, xi, L);
      }
    }
  });
  return K;
}

// Applies the 1-d kernel along `axis` of the row-major buffer (last axis
// fastest). Lines are independent, so the parallel split is deterministic.
// Without a stored matrix (single-sweep n = 1 case) the output rows are
// generated on the fly and the parallel split runs over rows instead.
inline void sweep_axis(const HeatAxisKernel& K, int n, int axis,
                       const std::vector<ld>& in, std::vector<ld>& out) {
  const int m = K.m;
  if (!K.store) {
    parallel_for(m, [&](std::size_t lo, std::size_t hi) {
      std::vector<ld> row(m);
      for (std::size_t i = lo; i < hi; ++i) {
        ld tl, tr;
        fill_heat_row(m, K.L, K.h, K.s, K.tail, static_cast<int>(i),
                      row.data(), tl, tr);
        ld acc = 0.0L;
        for (int j = 0; j < m; ++j) acc += row[j] * in[j];
        if (K.tail == TailPolicy::ConstantExtension)
          acc += tl * in[0] + tr * in[m - 1];
        out[i] = acc;
      }
    });
    return;
  }
  std::size_t stride = 1;
  for (int a = n - 1; a > axis; --a) stride *= m;
  const std::size_t block = stride * m;
  const std::size_t nlines = in.size() / m;
  parallel_for(nlines, [&](std::size_t lo, std::size_t hi) {
    std::vector<ld> line(m), res(m);
    for (std::size_t ln = lo; ln < hi; ++ln) {
      std::size_t blk = (ln / stride) * block;
      std::size_t off = ln % stride;
      std::size_t base = blk + off;
      for (int j = 0; j < m; ++j) line[j] = in[base + j * stride];
      for (int i = 0; i < m; ++i) {
        const ld* row = &K.M[(std::size_t)i * m];
        ld acc = 0.0L;
        for (int j = 0; j < m; ++j) acc += row[j] * line[j];
        if (K.tail == TailPolicy::ConstantExtension)
          acc += K.TL[i] * line[0] + K.TR[i] * line[m - 1];
        res[i] = acc;
      }
      for (int j = 0; j < m; ++j) out[base + j * stride] = res[j];
    }
  });
}

// Double-precision sweep used by the derivative kernels.
inline void sweep_axis_d(const HeatDsAxisKernels& K, bool use_ds, int n,
                         int axis, const std::vector<double>& in,
                         std::vector<double>& out) {
  const int m = K.m;
  const std::vector<double>& M = use_ds ? K.Mds : K.M;
  const std::vector<double>& TL = use_ds ? K.TLds : K.TL;
  const std::vector<double>& TR = use_ds ? K.TRds : K.TR;
  std::size_t stride = 1;
  for (int a = n - 1; a > axis; --a) stride *= m;
  const std::size_t block = stride * m;
  const std::size_t nlines = in.size() / m;
  parallel_for(nlines, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> line(m), res(m);
    for (std::size_t ln = lo; ln < hi; ++ln) {
      std::size_t blk = (ln / stride) * block;
      std::size_t off = ln % stride;
      std::size_t base = blk + off;
      for (int j = 0; j < m; ++j) line[j] = in[base + j * stride];
      for (int i = 0; i < m; ++i) {
        const double* row = &M[(std::size_t)i * m];
        double acc = 0.0;
        for (int j = 0; j < m; ++j) acc += row[j] * line[j];
        if (K.tail == TailPolicy::ConstantExtension)
          acc += TL[i] * line[0] + TR[i] * line[m - 1];
        res[i] = acc;
      }
      for (int j = 0; j < m; ++j) out[base + j * stride] = res[j];
    }
  });
}

inline std::vector<ld> widen(std::span<const double> v) {
  return std::vector<ld>(v.begin(), v.end());
}

inline GridFunction narrow(const GridFunction& like,
                           const std::vector<ld>& v) {
  std::vector<double> d(v.begin(), v.end());
  return GridFunction(like.dim(), like.box_half_width(),
                      like.points_per_axis(), std::move(d));
}

}  // namespace detail

// Heat semigroup applied to grid samples: tensor-product sweeps of the 1-d
// kernel, trapezoid quadrature for resolved widths and truncated-Gaussian
// moments against the linear interpolant otherwise.
inline GridFunction apply_heat(const GridFunction& f, MedaParam p,
                               const ApplyOptions& opts = {}) {
  if (std::isfinite(opts.max_truncation)) {
    double worst = 0.0;
    const double L = f.box_half_width();
    for (int i = 0; i < f.points_per_axis(); ++i) {
      double x = f.coord(i);
      worst = std::max(worst, heat_tail_mass_left(p, x, L) +
                                  heat_tail_mass_right(p, x, L));
    }
    double bound = worst * f.dim() * f.max_abs();
    if (bound > opts.max_truncation)
      throw AccuracyError("apply_heat: box-truncation bound exceeds tolerance",
                          bound);
  }
  auto K = detail::build_heat_axis_kernel(f.points_per_axis(),
                                          f.box_half_width(), p.s, opts.tail,
                                          /*store=*/f.dim() > 1);
  std::vector<detail::ld> cur = detail::widen(f.samples());
  std::vector<detail::ld> nxt(cur.size());
  for (int a = 0; a < f.dim(); ++a) {
    detail::sweep_axis(K, f.dim(), a, cur, nxt);
    std::swap(cur, nxt);
  }
  return detail::narrow(f, cur);
}

// d/ds of the heat application (used by the g-function). Throws
// ResolutionError when s is below what the grid resolves.
inline GridFunction apply_heat_ds(const GridFunction& f, MedaParam p,
                                  const ApplyOptions& opts = {}) {
  const int n = f.dim();
  auto K = detail::build_heat_ds_axis_kernels(f.points_per_axis(),
                                              f.box_half_width(), p.s,
                                              opts.tail, n > 1);
  std::vector<double> acc(f.size(), 0.0);
  std::vector<double> cur, nxt(f.size());
  for (int da = 0; da < n; ++da) {
    cur.assign(f.samples().begin(), f.samples().end());
    for (int a = 0; a < n; ++a) {
      detail::sweep_axis_d(K, a == da, n, a, cur, nxt);
      std::swap(cur, nxt);
    }
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += cur[i];
  }
  return GridFunction(n, f.box_half_width(), f.points_per_axis(),
                      std::move(acc));
}

// Poisson semigroup by subordination: with u = v^2,
//   P_t f = (2/sqrt(pi)) int_0^inf e^{-v^2} W_{t^2/(4 v^2)} f dv.
// Heat times above tau_max contribute below e^{-tau_max} and are dropped
// into the returned error estimate.
inline GridFunction apply_poisson(const GridFunction& f, double t,
                                  const ApplyOptions& opts = {},
                                  double* err_estimate = nullptr) {
  if (!(t > 0.0)) throw std::domain_error("apply_poisson: t must be > 0");
  const double tau_max = 19.0;
  const double v_lo = t / (2.0 * std::sqrt(tau_max));
  const double v_hi = 6.5;
  static const double base_edges[] = {0.02, 0.05, 0.12, 0.3, 0.7, 1.5, 3.0};
  std::vector<double> edges{v_lo};
  for (double e : base_edges)
    if (e > v_lo && e < v_hi) edges.push_back(e);
  edges.push_back(v_hi);

  const GaussRule& gl = gauss_legendre(12);
  std::vector<detail::ld> acc(f.size(), 0.0L);
  const double c0 = 2.0 / std::sqrt(std::numbers::pi);
  double dropped = std::exp(-tau_max) * f.max_abs() * c0 * v_lo +
                   std::erfc(v_hi) * f.max_abs();
  for (std::size_t pnl = 0; pnl + 1 < edges.size(); ++pnl) {
    double mid = 0.5 * (edges[pnl] + edges[pnl + 1]);
    double half = 0.5 * (edges[pnl + 1] - edges[pnl]);
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      double v = mid + half * gl.nodes[q];
      double tau = t * t / (4.0 * v * v);
      double s = std::min(std::tanh(tau), std::nextafter(1.0, 0.0));
      GridFunction w = apply_heat(f, MedaParam(s), opts);
      double coef = c0 * gl.weights[q] * half * std::exp(-v * v);
      for (std::size_t i = 0; i < acc.size(); ++i)
        acc[i] += (detail::ld)coef * (detail::ld)w[i];
    }
  }
  if (err_estimate) *err_estimate = dropped;
  return detail::narrow(f, acc);
}

enum class Semigroup { Heat, Poisson };

// Pointwise sup of |T_t f| over the sampled orbit; monotone under grid
// refinement by construction.
inline GridFunction maximal_operator(const GridFunction& f,
                                     const TimeGrid& grid, Semigroup sg,
                                     const ApplyOptions& opts = {}) {
  GridFunction out = GridFunction::constant(
      f.dim(), f.box_half_width(), f.points_per_axis(), 0.0);
  for (double s : grid.s_values) {
    GridFunction w = sg == Semigroup::Heat
                         ? apply_heat(f, MedaParam(s), opts)
                         : apply_poisson(f, meda_time(s), opts);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = std::max(out[i], std::fabs(w[i]));
  }
  return out;
}

struct GFunctionOptions {
  double tol = 1e-3;          // certified-tail threshold
  TailPolicy tail = TailPolicy::ConstantExtension;
  double logt_step = 1e-3;    // central-difference step for Poisson
};

// Littlewood-Paley g-function: sqrt of the L^2(dt/t) norm of t d/dt T_t f,
// quadrature by trapezoid in log t on the sampled orbit. The heat derivative
// is analytic (chain rule t d/dt = t (1-s^2) d/ds); the Poisson derivative
// uses central differences in log t.
inline GridFunction g_function(const GridFunction& f, const TimeGrid& grid,
                               Semigroup sg, const GFunctionOptions& opts = {}) {
  if (grid.size() < 8)
    throw std::invalid_argument("g_function: need at least 8 time nodes");
  const int n = f.dim();
  ApplyOptions aopts{opts.tail};

  std::vector<double> s_kept, t_kept;
  double s_floor = detail::min_resolved_s(f.h());
  for (double s : grid.s_values) {
    if (sg == Semigroup::Poisson || s >= s_floor) {
      s_kept.push_back(s);
      t_kept.push_back(meda_time(s));
    }
  }
  if (s_kept.size() < 2)
    throw ResolutionError("g_function: time grid entirely below resolution");
  std::vector<double> w = logt_trapezoid_weights(t_kept);

  std::vector<double> acc(f.size(), 0.0);
  std::vector<double> d_first(f.size(), 0.0), d_last(f.size(), 0.0);
  for (std::size_t j = 0; j < s_kept.size(); ++j) {
    double s = s_kept[j], t = t_kept[j];
    GridFunction D = [&] {
      if (sg == Semigroup::Heat) {
        GridFunction ds = apply_heat_ds(f, MedaParam(s), aopts);
        double c = t * (1.0 - s * s);
        for (std::size_t i = 0; i < ds.size(); ++i) ds[i] *= c;
        return ds;
      }
      double dl = opts.logt_step;
      GridFunction hiP = apply_poisson(f, t * std::exp(dl), aopts);
      GridFunction loP = apply_poisson(f, t * std::exp(-dl), aopts);
      for (std::size_t i = 0; i < hiP.size(); ++i)
        hiP[i] = (hiP[i] - loP[i]) / (2.0 * dl);
      return hiP;
    }();
    for (std::size_t i = 0; i < acc.size(); ++i)
      acc[i] += w[j] * D[i] * D[i];
    if (j + 1 == s_kept.size())
      for (std::size_t i = 0; i < acc.size(); ++i) d_first[i] = D[i];
    if (j == 0)
      for (std::size_t i = 0; i < acc.size(); ++i) d_last[i] = D[i];
  }

  // Certified tail per point: below the smallest kept time the integrand
  // scales like t^2 (so the missing piece is at most d_first^2/2); above the
  // largest it decays at least like e^{-2nt}. The induced error in g itself
  // is tail/(2g) once g dominates the tail.
  double worst_err = 0.0, gmax = 0.0;
  double t_big = t_kept.front();
  for (std::size_t i = 0; i < acc.size(); ++i) {
    double g = std::sqrt(acc[i]);
    gmax = std::max(gmax, g);
    double tail = 0.5 * d_first[i] * d_first[i] +
                  d_last[i] * d_last[i] / (2.0 * n * t_big);
    double err = std::sqrt(tail);
    if (g > err) err = tail / (2.0 * g);
    worst_err = std::max(worst_err, err);
  }
  if (worst_err > opts.tol * (1.0 + gmax))
    throw AccuracyError("g_function: certified tail exceeds tolerance",
                        worst_err);

  GridFunction out = GridFunction::constant(n, f.box_half_width(),
                                            f.points_per_axis(), 0.0);
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = std::sqrt(acc[i]);
  return out;
}

namespace detail {

// Per-point Riesz ring contributions: contrib[d] collects the quadrature
// terms at separation d*h on both sides of the point, using the cached
// fixed-rule diagonal evaluators.
class RieszRingTable {
 public:
  RieszRingTable(const GridFunction& f, int window)
      : f_(f), window_(window) {
    rules_.reserve(window);
    for (int d = 1; d <= window; ++d)
      rules_.emplace_back(d * f.h());
  }

  int window() const { return window_; }

  // contrib[d-1] = sum of kernel*sample*weight at |y - x_i| = d*h.
  void contributions(int i, std::vector<double>& contrib) const {
    const int m = f_.points_per_axis();
    const double h = f_.h();
    contrib.assign(window_, 0.0);
    double xi = f_.coord(i);
    for (int d = 1; d <= window_; ++d) {
      double c = 0.0;
      int jl = i - d, jr = i + d;
      if (jl >= 0) {
        double w = (jl == 0 || jl == m - 1) ? 0.5 * h : h;
        // b = x - y = d*h
        c += rules_[d - 1](xi + f_.coord(jl)) * f_[jl] * w;
      }
      if (jr < m) {
        double w = (jr == 0 || jr == m - 1) ? 0.5 * h : h;
        // b = -d*h: R(x,y) with b -> -b is built from the same |b| rule via
        // the explicit b dependence, so evaluate through the mirrored pair
        c += mirror(d, xi, f_.coord(jr)) * f_[jr] * w;
      }
      contrib[d - 1] = c;
    }
  }

 private:
  // R(x, y) with y = x + d*h: reuse the |b| rule; only the sign of b flips.
  double mirror(int d, double x, double y) const {
    return rules_[d - 1].mirrored(x + y);
  }

  const GridFunction& f_;
  int window_;
  std::vector<RieszDiagonalRule> rules_;
};

}  // namespace detail

namespace detail {

// Smallest ring index d with d*h strictly beyond eps.
inline int ring_min(double eps, double h) {
  return static_cast<int>(std::floor(eps / h * (1.0 + 1e-12))) + 1;
}

inline int riesz_window(const GridFunction& f) {
  // kernel ~ e^{-|x-y|^2/4}/|x-y| beyond the diagonal; 16 covers e^{-64}
  return std::min(f.points_per_axis() - 1,
                  static_cast<int>(std::ceil(16.0 / f.h())));
}

}  // namespace detail

// Truncated Riesz transform R_eps f(x) = int_{|x-y|>eps} R(x,y) f(y) dy on
// the grid (n = 1 only). The excision is symmetric in grid rings around x,
// so the odd singular part cancels in the quadrature sum.
inline GridFunction truncated_riesz(const GridFunction& f, int axis,
                                    double eps) {
  if (f.dim() != 1)
    throw std::invalid_argument("truncated_riesz: implemented for n = 1");
  if (axis != 1) throw std::invalid_argument("truncated_riesz: axis must be 1");
  if (!(eps >= 2.0 * f.h()))
    throw ResolutionError("truncated_riesz: eps must be >= 2h");
  const int window = detail::riesz_window(f);
  const int dmin = detail::ring_min(eps, f.h());
  detail::RieszRingTable table(f, window);
  GridFunction out = GridFunction::constant(1, f.box_half_width(),
                                            f.points_per_axis(), 0.0);
  parallel_for(f.size(), [&](std::size_t lo, std::size_t hi) {
    std::vector<double> contrib;
    for (std::size_t i = lo; i < hi; ++i) {
      table.contributions(static_cast<int>(i), contrib);
      double acc = 0.0;
      for (int d = window; d >= dmin; --d) acc += contrib[d - 1];
      out[i] = acc;
    }
  });
  return out;
}

struct VariationFamily {
  enum Kind { Heat, Poisson, RieszTruncations };
  Kind kind = Heat;
  int axis = 1;
};

// rho-variation of the sampled orbit, pointwise over the grid. For the
// truncated-Riesz family the TimeGrid values are read as the decreasing
// excision radii (entries below 2h are dropped).
inline GridFunction variation_field(const GridFunction& f,
                                    const TimeGrid& grid, VariationFamily fam,
                                    double rho, const ApplyOptions& opts = {}) {
  if (!(rho > 2.0))
    throw std::domain_error("variation_field: rho must be > 2");
  const std::size_t npts = f.size();
  GridFunction out = GridFunction::constant(f.dim(), f.box_half_width(),
                                            f.points_per_axis(), 0.0);

  if (fam.kind == VariationFamily::RieszTruncations) {
    if (f.dim() != 1)
      throw std::invalid_argument("variation_field: riesz family needs n = 1");
    std::vector<double> eps;
    for (double e : grid.s_values)
      if (e >= 2.0 * f.h()) eps.push_back(e);
    if (eps.empty())
      throw ResolutionError("variation_field: all excision radii below 2h");
    const int window = detail::riesz_window(f);
    detail::RieszRingTable table(f, window);
    parallel_for(npts, [&](std::size_t lo, std::size_t hi) {
      std::vector<double> contrib, orbit(eps.size());
      for (std::size_t i = lo; i < hi; ++i) {
        table.contributions(static_cast<int>(i), contrib);
        // suffix sums over rings, one orbit value per excision radius
        double acc = 0.0;
        int d = window;
        for (std::size_t j = 0; j < eps.size(); ++j) {
          int dmin = detail::ring_min(eps[j], f.h());
          for (; d >= dmin; --d) acc += contrib[d - 1];
          orbit[j] = acc;
        }
        out[i] = variation_operator(orbit, rho);
      }
    });
    return out;
  }

  std::vector<std::vector<double>> orbit(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double s = grid.s_values[j];
    GridFunction w = fam.kind == VariationFamily::Heat
                         ? apply_heat(f, MedaParam(s), opts)
                         : apply_poisson(f, meda_time(s), opts);
    orbit[j].assign(w.samples().begin(), w.samples().end());
  }
  parallel_for(npts, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> v(grid.size());
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = 0; j < grid.size(); ++j) v[j] = orbit[j][i];
      out[i] = variation_operator(v, rho);
    }
  });
  return out;
}

}  // namespace hbmo
