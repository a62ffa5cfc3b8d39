#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hbmo/errors.hpp"
#include "hbmo/geometry.hpp"
#include "hbmo/grid_function.hpp"
#include "hbmo/space.hpp"

namespace hbmo {
namespace detail {

// Grid samples inside the ball clipped to the box, with trapezoid-style
// quadrature weights: along each axis a sample whose neighbor leaves the
// ball (or the grid) counts half. No partial-cell weighting.
inline void ball_points(const GridFunction& f, const Ball& B,
                        std::vector<std::size_t>& out,
                        std::vector<double>& weights) {
  out.clear();
  weights.clear();
  const int n = f.dim();
  const int m = f.points_per_axis();
  const double h = f.h();
  const double r2 = B.radius * B.radius * (1.0 + 1e-14);
  std::vector<int> lo(n), hi(n), idx(n);
  for (int a = 0; a < n; ++a) {
    lo[a] = std::max(0, f.axis_index(B.center[a] - B.radius) - 1);
    hi[a] = std::min(m - 1, f.axis_index(B.center[a] + B.radius) + 1);
    if (lo[a] > hi[a]) return;
    idx[a] = lo[a];
  }
  std::vector<double> d(n);
  for (;;) {
    double d2 = 0.0;
    for (int a = 0; a < n; ++a) {
      d[a] = f.coord(idx[a]) - B.center[a];
      d2 += d[a] * d[a];
    }
    if (d2 <= r2) {
      std::size_t flat = 0;
      double w = 1.0;
      for (int a = 0; a < n; ++a) {
        flat = flat * m + idx[a];
        double rest = d2 - d[a] * d[a];
        bool minus_in = idx[a] > 0 && rest + (d[a] - h) * (d[a] - h) <= r2;
        bool plus_in =
            idx[a] < m - 1 && rest + (d[a] + h) * (d[a] + h) <= r2;
        if (!minus_in || !plus_in) w *= 0.5;
      }
      out.push_back(flat);
      weights.push_back(w);
    }
    int a = n - 1;
    while (a >= 0 && ++idx[a] > hi[a]) idx[a--] = lo[a];
    if (a < 0) break;
  }
}

inline std::size_t min_ball_points(int n) {
  std::size_t c = 1;
  for (int i = 0; i < n; ++i) c *= 2;
  return c;
}

struct BallStats {
  double mean = 0.0;
  double osc = 0.0;
  std::size_t count = 0;
};

inline BallStats weighted_stats(const GridFunction& f,
                                std::span<const std::size_t> idx,
                                std::span<const double> w) {
  BallStats st;
  st.count = idx.size();
  double wsum = 0.0, acc = 0.0;
  for (std::size_t q = 0; q < idx.size(); ++q) {
    wsum += w[q];
    acc += w[q] * f[idx[q]];
  }
  st.mean = acc / wsum;
  double dev = 0.0;
  for (std::size_t q = 0; q < idx.size(); ++q)
    dev += w[q] * std::fabs(f[idx[q]] - st.mean);
  st.osc = dev / wsum;
  return st;
}

}  // namespace detail

// Mean of f over the grid samples inside B (clipped to the box).
inline double ball_mean(const GridFunction& f, const Ball& B) {
  std::vector<std::size_t> idx;
  std::vector<double> w;
  detail::ball_points(f, B, idx, w);
  if (idx.size() < detail::min_ball_points(f.dim()))
    throw ResolutionError("ball_mean: ball holds fewer than 2^n samples");
  return detail::weighted_stats(f, idx, w).mean;
}

// Mean absolute deviation from the ball mean.
inline double oscillation(const GridFunction& f, const Ball& B) {
  std::vector<std::size_t> idx;
  std::vector<double> w;
  detail::ball_points(f, B, idx, w);
  if (idx.size() < detail::min_ball_points(f.dim()))
    throw ResolutionError("oscillation: ball holds fewer than 2^n samples");
  return detail::weighted_stats(f, idx, w).osc;
}

enum class OscWeight { OnePlusLog, LogOnly };

// (1 + log(gamma(x)/s)) times the oscillation over B(x, s), s <= gamma(x).
inline double log_weighted_oscillation(const GridFunction& f,
                                       std::span<const double> x, double s,
                                       OscWeight w = OscWeight::OnePlusLog) {
  double g = critical_radius(x);
  if (!(s > 0.0 && s <= g * (1.0 + 1e-14)))
    throw std::domain_error("log_weighted_oscillation: need 0 < s <= gamma(x)");
  double weight = std::log(g / s);
  if (w == OscWeight::OnePlusLog) weight += 1.0;
  return weight * oscillation(f, Ball(Point(x.begin(), x.end()), s));
}

struct BmoEstimate {
  double osc_sup = 0.0;    // condition (i): oscillations over all balls
  double mean_sup = 0.0;   // condition (ii): |f| means over large balls
  double norm = 0.0;       // max of the two
  std::optional<Ball> worst_osc_ball;
  std::optional<Ball> worst_mean_ball;
  std::size_t balls_used = 0;
  std::size_t balls_skipped = 0;  // below grid resolution
  bool converged = true;          // refinement moved the estimate < 5%
};

struct BmoOptions {
  int j_small_max = 8;        // dyadic small radii down to gamma 2^{-j}
  double lattice_spacing = 0.0;  // 0: min-over-box gamma / 4
  bool refine_check = false;  // double the families and compare
};

namespace detail {

inline BmoEstimate bmo_h_norm_once(const GridFunction& f,
                                   const SpaceContext& ctx,
                                   const BmoOptions& opt) {
  BmoEstimate est;
  std::vector<Point> centers = center_lattice(ctx, opt.lattice_spacing);
  std::vector<Ball> osc_balls =
      ball_family(ctx, BallKind::Small, centers, opt.j_small_max);
  {
    std::vector<Ball> crit = ball_family(ctx, BallKind::Critical, centers);
    osc_balls.insert(osc_balls.end(), crit.begin(), crit.end());
  }
  std::vector<Ball> mean_balls = ball_family(ctx, BallKind::Large, centers);

  std::vector<std::size_t> idx;
  std::vector<double> w;
  for (const Ball& B : osc_balls) {
    detail::ball_points(f, B, idx, w);
    if (idx.size() < detail::min_ball_points(f.dim())) {
      ++est.balls_skipped;
      continue;
    }
    ++est.balls_used;
    double acc = detail::weighted_stats(f, idx, w).osc;
    if (acc > est.osc_sup) {
      est.osc_sup = acc;
      est.worst_osc_ball = B;
    }
  }
  for (const Ball& B : mean_balls) {
    detail::ball_points(f, B, idx, w);
    if (idx.size() < detail::min_ball_points(f.dim())) {
      ++est.balls_skipped;
      continue;
    }
    ++est.balls_used;
    double wsum = 0.0, acc = 0.0;
    for (std::size_t q = 0; q < idx.size(); ++q) {
      wsum += w[q];
      acc += w[q] * std::fabs(f[idx[q]]);
    }
    acc /= wsum;
    if (acc > est.mean_sup) {
      est.mean_sup = acc;
      est.worst_mean_ball = B;
    }
  }
  est.norm = std::max(est.osc_sup, est.mean_sup);
  return est;
}

}  // namespace detail

// Lower bound for the BMO_H norm over the dyadic ball families:
// sup of oscillations (small + critical balls) against sup of |f| means
// (radii >= gamma). Monotone under family refinement.
inline BmoEstimate bmo_h_norm(const GridFunction& f, const SpaceContext& ctx,
                              const BmoOptions& opt = {}) {
  BmoEstimate est = detail::bmo_h_norm_once(f, ctx, opt);
  if (opt.refine_check) {
    BmoOptions fine = opt;
    fine.refine_check = false;
    fine.j_small_max = opt.j_small_max + 1;
    fine.lattice_spacing = (opt.lattice_spacing > 0.0
                                ? opt.lattice_spacing
                                : detail::min_critical_radius(ctx) / 4.0) /
                           2.0;
    BmoEstimate ref = detail::bmo_h_norm_once(f, ctx, fine);
    est.converged =
        std::fabs(ref.norm - est.norm) <= 0.05 * std::max(est.norm, 1e-300);
    if (ref.norm > est.norm) {
      est.osc_sup = ref.osc_sup;
      est.mean_sup = ref.mean_sup;
      est.norm = ref.norm;
      est.worst_osc_ball = ref.worst_osc_ball;
      est.worst_mean_ball = ref.worst_mean_ball;
    }
  }
  return est;
}

// The canonical log-spike: plateau log(gamma(x0)/s) inside |x-x0| <= s,
// then log(gamma(x0)/|x-x0|) out to gamma(x0), zero beyond.
inline double test_function(std::span<const double> x, double s,
                            std::span<const double> x0) {
  double g = critical_radius(x0);
  if (!(s > 0.0 && s <= g))
    throw std::domain_error("test_function: need 0 < s <= gamma(x0)");
  double r = dist(x, x0);
  if (r <= s) return std::log(g / s);
  if (r <= g) return std::log(g / r);
  return 0.0;
}

struct MultiplierThresholds {
  double sup_norm = 10.0;
  double logosc_sup = 10.0;
};

struct MultiplierReport {
  double sup_norm = 0.0;
  double logosc_sup = 0.0;
  bool passes = false;
  std::optional<Ball> worst_ball;
};

// Pointwise-multiplier check: sup norm of g plus the log(gamma/s)-weighted
// oscillation sup over small balls. Balls at s = gamma carry weight zero.
inline MultiplierReport multiplier_check(const GridFunction& g,
                                         const SpaceContext& ctx,
                                         const MultiplierThresholds& thr = {},
                                         const BmoOptions& opt = {}) {
  MultiplierReport rep;
  for (std::size_t i = 0; i < g.size(); ++i)
    rep.sup_norm = std::max(rep.sup_norm, std::fabs(g[i]));

  std::vector<Point> centers = center_lattice(ctx, opt.lattice_spacing);
  std::vector<std::size_t> idx;
  std::vector<double> w;
  for (const Point& c : centers) {
    double gam = critical_radius(c);
    for (int j = 1; j <= opt.j_small_max; ++j) {
      double s = gam * std::pow(2.0, -j);
      Ball B(c, s);
      detail::ball_points(g, B, idx, w);
      if (idx.size() < detail::min_ball_points(g.dim())) continue;
      double val = std::log(gam / s) * detail::weighted_stats(g, idx, w).osc;
      if (val > rep.logosc_sup) {
        rep.logosc_sup = val;
        rep.worst_ball = B;
      }
    }
  }
  rep.passes =
      rep.sup_norm <= thr.sup_norm && rep.logosc_sup <= thr.logosc_sup;
  return rep;
}

}  // namespace hbmo
