#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "hbmo/errors.hpp"
#include "hbmo/meda.hpp"
#include "hbmo/quadrature.hpp"
#include "hbmo/space.hpp"

namespace hbmo {

struct RieszQuadPolicy {
  double abs_tol = 1e-10;
  int max_depth = 26;
};

namespace detail {

struct RieszPieces {
  double A;    // |x+y|^2
  double B;    // |x-y|^2
  double a_i;  // (x+y)_i
  double b_i;  // (x-y)_i
  int n;
};

// Integrand of the s-form of the Riesz kernel,
//   d/dx_i W_{t(s)}(x,y) / ( sqrt(t(s)) (1-s^2) ),
// with 1-s^2 passed separately so the s -> 1 endpoint keeps full precision.
inline double riesz_integrand_s(const RieszPieces& P, double s,
                                double one_minus_s2) {
  const double pi = std::numbers::pi;
  double grad_factor = -0.5 * (s * P.a_i + P.b_i / s);
  double pref = std::pow(one_minus_s2 / (4.0 * pi * s), 0.5 * P.n);
  double expo = -(s * P.A) / 4.0 - P.B / (4.0 * s);
  double t = std::atanh(s);
  return grad_factor * pref * std::exp(expo) / (std::sqrt(t) * one_minus_s2);
}

}  // namespace detail

// Riesz transform kernel
//   R_i(x,y) = (1/sqrt(pi)) int_0^inf d/dx_i W_t(x,y) dt / sqrt(t),
// evaluated in the s variable (dt = ds/(1-s^2)) with the substitution
// u = |x-y|^2/(4s) on (0,1/2] (clusters nodes where the integrand peaks)
// and s = 1-v^2 on [1/2,1) (removes the endpoint singularity for n = 1).
inline double riesz_kernel(int axis, std::span<const double> x,
                           std::span<const double> y,
                           const RieszQuadPolicy& policy = {}) {
  const int n = static_cast<int>(x.size());
  if (y.size() != x.size())
    throw std::invalid_argument("riesz_kernel: dimension mismatch");
  if (axis < 1 || axis > n)
    throw std::invalid_argument("riesz_kernel: axis out of range");
  detail::RieszPieces P;
  P.n = n;
  P.A = P.B = 0.0;
  for (int i = 0; i < n; ++i) {
    double a = x[i] + y[i], b = x[i] - y[i];
    P.A += a * a;
    P.B += b * b;
  }
  if (P.B == 0.0) throw std::domain_error("riesz_kernel: x == y is singular");
  P.a_i = x[axis - 1] + y[axis - 1];
  P.b_i = x[axis - 1] - y[axis - 1];

  // s in (0, 1/2]: u = B/(4s).
  auto f_lo = [&](double u) {
    double s = P.B / (4.0 * u);
    return detail::riesz_integrand_s(P, s, (1.0 - s) * (1.0 + s)) * P.B /
           (4.0 * u * u);
  };
  QuadResult lo = adaptive_quadrature(f_lo, 0.5 * P.B, 0.5 * P.B + 64.0,
                                      0.5 * policy.abs_tol, policy.max_depth);

  // s in [1/2, 1): s = 1 - v^2.
  auto f_hi = [&](double v) {
    double s = 1.0 - v * v;
    double one_minus_s2 = v * v * (2.0 - v * v);
    return detail::riesz_integrand_s(P, s, one_minus_s2) * 2.0 * v;
  };
  QuadResult hi = adaptive_quadrature(f_hi, 0.0, std::numbers::sqrt2 / 2.0,
                                      0.5 * policy.abs_tol, policy.max_depth);

  return (lo.value + hi.value) / std::sqrt(std::numbers::pi);
}

// Fixed-rule evaluator for one-dimensional Riesz kernel values sharing the
// same separation b = x - y. The b-dependent node coefficients are
// precomputed; each evaluation then costs one exp per node. Matches the
// adaptive route to ~1e-9 absolute (checked in the test suite).
class RieszDiagonalRule {
 public:
  explicit RieszDiagonalRule(double b) : b_(b) {
    const double B = b * b;
    if (B == 0.0)
      throw std::domain_error("RieszDiagonalRule: zero separation");
    const GaussRule& gl = gauss_legendre(16);
    const double pi = std::numbers::pi;
    const double global = 1.0 / std::sqrt(pi);

    // u-part panels in w = u - B/2 over [0, 64]. The prefactors transition
    // over w of order B while the exponential decays on scale 1, so the
    // edges mix both scales.
    std::vector<double> wedges{0.0};
    for (double c : {1.0, 3.0, 7.0, 15.0, 31.0})
      if (c * B < 1.0) wedges.push_back(c * B);
    for (double c : {1.0, 3.0, 7.0, 15.0, 31.0, 64.0}) wedges.push_back(c);
    for (std::size_t p = 0; p + 1 < wedges.size(); ++p) {
      double aw = wedges[p], bw = wedges[p + 1];
      double mid = 0.5 * (aw + bw), half = 0.5 * (bw - aw);
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        double u = 0.5 * B + mid + half * gl.nodes[q];
        double s = B / (4.0 * u);
        double one_minus_s2 = (1.0 - s) * (1.0 + s);
        double jac = B / (4.0 * u * u);
        push_node(s, one_minus_s2,
                  global * gl.weights[q] * half * jac);
      }
    }
    // v-part panels over [0, 1/sqrt(2)], s = 1 - v^2.
    static const double vedges[] = {0.0,  0.05, 0.15,
                                    0.3,  0.45, 0.70710678118654752};
    for (std::size_t p = 0; p + 1 < std::size(vedges); ++p) {
      double av = vedges[p], bv = vedges[p + 1];
      double mid = 0.5 * (av + bv), half = 0.5 * (bv - av);
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        double v = mid + half * gl.nodes[q];
        double s = 1.0 - v * v;
        double one_minus_s2 = v * v * (2.0 - v * v);
        push_node(s, one_minus_s2,
                  global * gl.weights[q] * half * 2.0 * v);
      }
    }
  }

  // R(x, y) with x + y = a and the fixed x - y = b.
  double operator()(double a) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < s_.size(); ++k)
      acc += c_[k] * (s_[k] * a + b_ / s_[k]) * std::exp(q_[k] * a * a);
    return acc;
  }

  // Same rule with the separation sign flipped (x - y = -b); the node
  // coefficients depend on b only through b^2.
  double mirrored(double a) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < s_.size(); ++k)
      acc += c_[k] * (s_[k] * a - b_ / s_[k]) * std::exp(q_[k] * a * a);
    return acc;
  }

 private:
  void push_node(double s, double one_minus_s2, double w) {
    const double pi = std::numbers::pi;
    double B = b_ * b_;
    double pref = std::sqrt(one_minus_s2 / (4.0 * pi * s));
    double t = std::atanh(s);
    double c = -0.5 * w * pref * std::exp(-B / (4.0 * s)) /
               (std::sqrt(t) * one_minus_s2);
    if (c != 0.0) {
      s_.push_back(s);
      q_.push_back(-s / 4.0);
      c_.push_back(c);
    }
  }

  double b_;
  std::vector<double> s_, q_, c_;
};

}  // namespace hbmo
