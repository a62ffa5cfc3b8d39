#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace hbmo {

using Point = std::vector<double>;

inline double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

inline double norm(std::span<const double> x) { return std::sqrt(norm2(x)); }

inline double dist(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

// Dimension, computational box [-L, L]^n and default tolerance shared by
// every sweep and quadrature in the library.
struct SpaceContext {
  int n;
  double box_half_width;
  double tol;

  SpaceContext(int n_, double L, double tol_ = 1e-8)
      : n(n_), box_half_width(L), tol(tol_) {
    if (n < 1) throw std::invalid_argument("SpaceContext: n must be >= 1");
    if (!(L > 0.0))
      throw std::invalid_argument("SpaceContext: box_half_width must be > 0");
    if (!(tol > 0.0 && tol < 1.0))
      throw std::invalid_argument("SpaceContext: tol must be in (0,1)");
  }
};

// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

}  // namespace hbmo
