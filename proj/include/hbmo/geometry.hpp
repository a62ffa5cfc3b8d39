#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "hbmo/space.hpp"

namespace hbmo {

// Critical radius: gamma(x) = 1/(1+|x|) for |x| >= 1, gamma(x) = 1/2 below.
// Always in (0, 1/2].
inline double critical_radius_from_norm(double xn) {
  return xn >= 1.0 ? 1.0 / (1.0 + xn) : 0.5;
}

inline double critical_radius(std::span<const double> x) {
  return critical_radius_from_norm(norm(x));
}

// Observed comparability ratio max(gamma(x)/gamma(y), gamma(y)/gamma(x)) for
// an admissible pair |x-y| <= C gamma(x).
inline double gamma_comparability(std::span<const double> x,
                                  std::span<const double> y, double C) {
  if (!(C > 0.0))
    throw std::invalid_argument("gamma_comparability: C must be > 0");
  double gx = critical_radius(x);
  if (dist(x, y) > C * gx + 1e-15)
    throw std::invalid_argument(
        "gamma_comparability: pair violates |x-y| <= C gamma(x)");
  double gy = critical_radius(y);
  return std::max(gx / gy, gy / gx);
}

struct Ball {
  Point center;
  double radius;

  Ball(Point c, double r) : center(std::move(c)), radius(r) {
    if (!(radius > 0.0)) throw std::invalid_argument("Ball: radius must be > 0");
  }

  double volume() const {
    return unit_ball_volume(static_cast<int>(center.size())) *
           std::pow(radius, static_cast<double>(center.size()));
  }

  bool contains(std::span<const double> x) const {
    return dist(center, x) <= radius;
  }
};

// Balls Q_k = B(x_k, gamma(x_k)) covering the box, with the overlap count of
// the four-times-dilated balls computed (not assumed).
struct CriticalCovering {
  std::vector<Point> centers;
  std::vector<double> radii;
  int overlap_bound = 0;
};

namespace detail {

// Lattice over [-L, L]^n with the given spacing; always contains the origin.
inline std::vector<Point> box_lattice(int n, double L, double spacing) {
  int half = static_cast<int>(std::floor(L / spacing + 1e-12));
  std::vector<Point> pts;
  std::vector<int> idx(n, -half);
  for (;;) {
    Point p(n);
    for (int i = 0; i < n; ++i) p[i] = idx[i] * spacing;
    pts.push_back(std::move(p));
    int a = n - 1;
    while (a >= 0 && ++idx[a] > half) idx[a--] = -half;
    if (a < 0) break;
  }
  return pts;
}

inline double min_critical_radius(const SpaceContext& ctx) {
  double corner = ctx.box_half_width * std::sqrt(static_cast<double>(ctx.n));
  return critical_radius_from_norm(corner);
}

}  // namespace detail

// Greedy construction: repeatedly promote the uncovered lattice point closest
// to the origin (ties broken lexicographically) to a center. Every lattice
// point ends up inside some Q_k; consecutive centers sit within the covering
// radius of their neighbor plus one lattice step. The overlap bound of the
// Q_k** is computed pairwise.
inline CriticalCovering build_critical_covering(const SpaceContext& ctx) {
  double gmin = detail::min_critical_radius(ctx);
  double spacing = gmin / 8.0;
  std::vector<Point> lattice =
      detail::box_lattice(ctx.n, ctx.box_half_width, spacing);

  std::vector<std::size_t> order(lattice.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double na = norm2(lattice[a]), nb = norm2(lattice[b]);
    if (na != nb) return na < nb;
    return lattice[a] < lattice[b];
  });

  CriticalCovering cov;
  std::vector<char> covered(lattice.size(), 0);
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    std::size_t i = order[oi];
    if (covered[i]) continue;
    const Point& c = lattice[i];
    double g = critical_radius(c);
    cov.centers.push_back(c);
    cov.radii.push_back(g);
    for (std::size_t oj = oi; oj < order.size(); ++oj) {
      std::size_t j = order[oj];
      if (!covered[j] && dist(c, lattice[j]) <= g) covered[j] = 1;
    }
  }

  int worst = 0;
  for (std::size_t k = 0; k < cov.centers.size(); ++k) {
    int cnt = 0;
    for (std::size_t j = 0; j < cov.centers.size(); ++j) {
      double touch = 4.0 * cov.radii[k] + 4.0 * cov.radii[j];
      if (dist(cov.centers[k], cov.centers[j]) <= touch) ++cnt;
    }
    worst = std::max(worst, cnt);
  }
  cov.overlap_bound = worst;
  return cov;
}

enum class BallKind { Small, Critical, Large };

// Dyadic ball families around explicit centers: radii gamma(c) 2^{-j}
// (small, j = 1..j_max), gamma(c) (critical), or gamma(c) 2^{j} capped at the
// box half-width (large).
inline std::vector<Ball> ball_family(const SpaceContext& ctx, BallKind kind,
                                     std::span<const Point> centers,
                                     int j_max = 6) {
  std::vector<Ball> balls;
  for (const Point& c : centers) {
    double g = critical_radius(c);
    switch (kind) {
      case BallKind::Critical:
        balls.emplace_back(c, g);
        break;
      case BallKind::Small:
        for (int j = 1; j <= j_max; ++j)
          balls.emplace_back(c, g * std::pow(2.0, -j));
        break;
      case BallKind::Large: {
        double r = g;
        do {
          balls.emplace_back(c, r);
          r *= 2.0;
        } while (r <= ctx.box_half_width);
        break;
      }
    }
  }
  return balls;
}

// Default centers: uniform lattice with spacing min-over-box gamma / 4.
inline std::vector<Point> center_lattice(const SpaceContext& ctx,
                                         double spacing = 0.0) {
  if (spacing <= 0.0) spacing = detail::min_critical_radius(ctx) / 4.0;
  return detail::box_lattice(ctx.n, ctx.box_half_width, spacing);
}

inline std::vector<Ball> ball_family(const SpaceContext& ctx, BallKind kind,
                                     int j_max = 6) {
  std::vector<Point> centers = center_lattice(ctx);
  return ball_family(ctx, kind, centers, j_max);
}

}  // namespace hbmo
