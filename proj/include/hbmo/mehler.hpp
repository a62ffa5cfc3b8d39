#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "hbmo/meda.hpp"
#include "hbmo/space.hpp"

namespace hbmo {
namespace detail {

// One-dimensional heat kernel in the s variable,
//   w(s,x,y) = ((1-s^2)/(4 pi s))^{1/2} exp(-[s(x+y)^2 + (x-y)^2/s]/4).
// The n-dimensional kernel is the tensor product over coordinates.
template <class R>
R heat1d(R s, R x, R y) {
  const R pi = std::numbers::pi_v<R>;
  R a = x + y, b = x - y;
  return std::sqrt((1 - s * s) / (4 * pi * s)) *
         std::exp(-(s * a * a + b * b / s) / 4);
}

// d/ds of heat1d.
template <class R>
R heat1d_ds(R s, R x, R y) {
  R a = x + y, b = x - y;
  R logder = -s / (1 - s * s) - 1 / (2 * s) - (a * a - b * b / (s * s)) / 4;
  return heat1d(s, x, y) * logder;
}

// The kernel in y is mass * N(mu, sigma^2):
//   mass  = ((1-s^2)/(1+s^2))^{1/2} exp(-s x^2 / (1+s^2))   (the 1-d mass),
//   mu    = (1-s^2) x / (1+s^2),
//   sigma = sqrt(2s/(1+s^2)).
template <class R>
struct HeatGauss {
  R mass, mu, sigma;
};

template <class R>
HeatGauss<R> heat1d_gauss(R s, R x) {
  R s2 = s * s;
  R mass = std::sqrt((1 - s2) / (1 + s2)) * std::exp(-s * x * x / (1 + s2));
  R mu = (1 - s2) * x / (1 + s2);
  R sigma = std::sqrt(2 * s / (1 + s2));
  return {mass, mu, sigma};
}

template <class R>
R phi_std(R z) {
  const R pi = std::numbers::pi_v<R>;
  return std::exp(-z * z / 2) / std::sqrt(2 * pi);
}

template <class R>
R Phi_std(R z) {
  return std::erfc(-z / std::sqrt(R(2))) / 2;
}

inline long double erfc_ld(long double z) { return erfcl(z); }

}  // namespace detail

// Heat kernel straight from the Mehler display in the time variable.
inline double heat_kernel(double t, std::span<const double> x,
                          std::span<const double> y) {
  if (!(t > 0.0)) throw std::domain_error("heat_kernel: t must be > 0");
  if (x.size() != y.size())
    throw std::invalid_argument("heat_kernel: dimension mismatch");
  const double n = static_cast<double>(x.size());
  double e2 = std::exp(-2.0 * t);
  double e4 = std::exp(-4.0 * t);
  double pref = std::pow(e2 / (std::numbers::pi * (1.0 - e4)), 0.5 * n);
  double q = (1.0 + e4) / (1.0 - e4) * (norm2(x) + norm2(y)) -
             4.0 * e2 / (1.0 - e4) * dot(x, y);
  return pref * std::exp(-0.5 * q);
}

// Heat kernel in the s variable (the closed form used internally).
inline double heat_kernel_meda(MedaParam p, std::span<const double> x,
                               std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("heat_kernel_meda: dimension mismatch");
  double acc = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    acc *= detail::heat1d(p.s, x[i], y[i]);
  return acc;
}

// Gradient in x of the s-form kernel:
//   grad_i = -(1/2) [ s (x+y)_i + (x-y)_i / s ] * W.
inline Point heat_kernel_grad_x(MedaParam p, std::span<const double> x,
                                std::span<const double> y) {
  double w = heat_kernel_meda(p, x, y);
  Point g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    g[i] = -0.5 * (p.s * (x[i] + y[i]) + (x[i] - y[i]) / p.s) * w;
  return g;
}

// Analytic d/ds of the s-form kernel.
inline double heat_kernel_ds(MedaParam p, std::span<const double> x,
                             std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("heat_kernel_ds: dimension mismatch");
  const double s = p.s;
  const double n = static_cast<double>(x.size());
  double A = 0.0, B = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double a = x[i] + y[i], b = x[i] - y[i];
    A += a * a;
    B += b * b;
  }
  double logder =
      n * (-s / (1.0 - s * s) - 1.0 / (2.0 * s)) - (A - B / (s * s)) / 4.0;
  return heat_kernel_meda(p, x, y) * logder;
}

// Action of the semigroup on the constant function 1:
//   W_{t(s)} 1(x) = ((1-s^2)/(1+s^2))^{n/2} exp(-s |x|^2 / (1+s^2)).
// The normalization is pinned by lim_{t->0} W_t 1 = 1 and certified against
// quadrature of the kernel (the mass identity).
inline double heat_action_on_one(MedaParam p, std::span<const double> x) {
  double acc = 1.0;
  for (double xi : x) acc *= detail::heat1d_gauss(p.s, xi).mass;
  return acc;
}

inline double heat_action_on_one(MedaParam p, double xnorm2, int n) {
  double s2 = p.s * p.s;
  return std::pow((1.0 - s2) / (1.0 + s2), 0.5 * n) *
         std::exp(-p.s * xnorm2 / (1.0 + s2));
}

// d/ds of the mass function above.
inline double heat_action_on_one_ds(MedaParam p, double xnorm2, int n) {
  double s = p.s, s2 = s * s;
  double logder = -2.0 * n * s / (1.0 - s2 * s2) -
                  xnorm2 * (1.0 - s2) / ((1.0 + s2) * (1.0 + s2));
  return heat_action_on_one(p, xnorm2, n) * logder;
}

inline double heat_action_on_one_ds(MedaParam p, std::span<const double> x) {
  return heat_action_on_one_ds(p, norm2(x), static_cast<int>(x.size()));
}

// One-dimensional kernel mass over an interval, mass * [Phi(z1) - Phi(z0)].
inline double heat_mass_on_interval(MedaParam p, double x, double y0,
                                    double y1) {
  auto g = detail::heat1d_gauss(p.s, x);
  double z0 = (y0 - g.mu) / g.sigma, z1 = (y1 - g.mu) / g.sigma;
  return g.mass * (detail::Phi_std(z1) - detail::Phi_std(z0));
}

// Kernel mass over the half-lines outside [-L, L].
inline double heat_tail_mass_left(MedaParam p, double x, double L) {
  auto g = detail::heat1d_gauss(p.s, x);
  return g.mass * detail::Phi_std((-L - g.mu) / g.sigma);
}

inline double heat_tail_mass_right(MedaParam p, double x, double L) {
  auto g = detail::heat1d_gauss(p.s, x);
  return g.mass * (1.0 - detail::Phi_std((L - g.mu) / g.sigma));
}

// d/ds of the kernel mass over the two half-lines outside [-L, L]
// (boundary-tail terms of derivative sweeps).
inline double heat_tail_mass_left_ds(MedaParam p, double x, double L) {
  double s = p.s, s2 = s * s;
  auto g = detail::heat1d_gauss(s, x);
  double dmass = g.mass * (-2.0 * s / (1.0 - s2 * s2) -
                           x * x * (1.0 - s2) / ((1.0 + s2) * (1.0 + s2)));
  double dmu = -4.0 * s * x / ((1.0 + s2) * (1.0 + s2));
  double dsigma = (1.0 - s2) / (g.sigma * (1.0 + s2) * (1.0 + s2));
  double z = (-L - g.mu) / g.sigma;
  double dz = -dmu / g.sigma - z * dsigma / g.sigma;
  return dmass * detail::Phi_std(z) + g.mass * detail::phi_std(z) * dz;
}

inline double heat_tail_mass_right_ds(MedaParam p, double x, double L) {
  double s = p.s, s2 = s * s;
  auto g = detail::heat1d_gauss(s, x);
  double dmass = g.mass * (-2.0 * s / (1.0 - s2 * s2) -
                           x * x * (1.0 - s2) / ((1.0 + s2) * (1.0 + s2)));
  double dmu = -4.0 * s * x / ((1.0 + s2) * (1.0 + s2));
  double dsigma = (1.0 - s2) / (g.sigma * (1.0 + s2) * (1.0 + s2));
  double z = (L - g.mu) / g.sigma;
  double dz = -dmu / g.sigma - z * dsigma / g.sigma;
  return dmass * (1.0 - detail::Phi_std(z)) - g.mass * detail::phi_std(z) * dz;
}

// Analytic d/ds of heat_mass_on_interval (used for boundary-tail terms of
// derivative sweeps).
inline double heat_mass_on_interval_ds(MedaParam p, double x, double y0,
                                       double y1) {
  double s = p.s, s2 = s * s;
  auto g = detail::heat1d_gauss(s, x);
  double dmass =
      g.mass * (-2.0 * s / (1.0 - s2 * s2) -
                x * x * (1.0 - s2) / ((1.0 + s2) * (1.0 + s2)));
  double dmu = -4.0 * s * x / ((1.0 + s2) * (1.0 + s2));
  double dsigma = (1.0 - s2) / (g.sigma * (1.0 + s2) * (1.0 + s2));
  double z0 = (y0 - g.mu) / g.sigma, z1 = (y1 - g.mu) / g.sigma;
  double dz0 = -dmu / g.sigma - z0 * dsigma / g.sigma;
  double dz1 = -dmu / g.sigma - z1 * dsigma / g.sigma;
  double bracket = detail::Phi_std(z1) - detail::Phi_std(z0);
  double dbracket = detail::phi_std(z1) * dz1 - detail::phi_std(z0) * dz0;
  return dmass * bracket + g.mass * dbracket;
}

}  // namespace hbmo
