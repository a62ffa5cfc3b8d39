#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "hbmo/errors.hpp"

namespace hbmo {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule computed by Newton iteration on P_n.
inline GaussRule make_gauss_legendre(int npts) {
  GaussRule r;
  r.nodes.resize(npts);
  r.weights.resize(npts);
  for (int i = 0; i < (npts + 1) / 2; ++i) {
    long double x = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) /
                             (npts + 0.5L));
    long double pp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L, p1 = x;
      for (int k = 2; k <= npts; ++k) {
        long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = npts * (x * p1 - p0) / (x * x - 1.0L);
      long double dx = p1 / pp;
      x -= dx;
      if (std::fabs((double)dx) < 1e-17) break;
    }
    double w = (double)(2.0L / ((1.0L - x * x) * pp * pp));
    r.nodes[i] = (double)-x;
    r.weights[i] = w;
    r.nodes[npts - 1 - i] = (double)x;
    r.weights[npts - 1 - i] = w;
  }
  return r;
}

inline const GaussRule& gauss_legendre(int npts) {
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(npts);
  if (it == cache.end()) it = cache.emplace(npts, make_gauss_legendre(npts)).first;
  return it->second;
}

template <class F>
double integrate_gl(F&& f, double a, double b, const GaussRule& rule) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

struct QuadResult {
  double value;
  double err_estimate;
};

namespace detail {

template <class F>
QuadResult adaptive_gl_rec(F& f, double a, double b, double tol,
                           const GaussRule& lo, const GaussRule& hi,
                           int depth) {
  double vlo = integrate_gl(f, a, b, lo);
  double vhi = integrate_gl(f, a, b, hi);
  double err = std::fabs(vhi - vlo);
  if (err <= tol || depth <= 0) return {vhi, err};
  double mid = 0.5 * (a + b);
  QuadResult left = adaptive_gl_rec(f, a, mid, 0.5 * tol, lo, hi, depth - 1);
  QuadResult right = adaptive_gl_rec(f, mid, b, 0.5 * tol, lo, hi, depth - 1);
  return {left.value + right.value, left.err_estimate + right.err_estimate};
}

}  // namespace detail

// Adaptive Gauss quadrature with a GL(12)/GL(24) error probe and bisection.
// Throws AccuracyError when the requested absolute tolerance is unreachable
// within the depth budget.
template <class F>
QuadResult adaptive_quadrature(F&& f, double a, double b, double abs_tol,
                               int max_depth = 26, bool throw_on_fail = true) {
  const GaussRule& lo = gauss_legendre(12);
  const GaussRule& hi = gauss_legendre(24);
  QuadResult r = detail::adaptive_gl_rec(f, a, b, abs_tol, lo, hi, max_depth);
  if (throw_on_fail && !(r.err_estimate <= 8.0 * abs_tol))
    throw AccuracyError("adaptive_quadrature did not converge", r.err_estimate);
  return r;
}

// Trapezoid weights (including the grid step) for a uniform grid of m points.
inline std::vector<double> trapezoid_weights(int m, double h) {
  std::vector<double> w(m, h);
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

// Trapezoid rule over a non-uniform abscissa list.
inline double trapezoid_nonuniform(std::span<const double> x,
                                   std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    acc += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
  return acc;
}

}  // namespace hbmo
