#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "hbmo/quadrature.hpp"

namespace hbmo {

// Exact sup over subsequences of sum |v_i - v_j|^rho, by the dynamic program
//   V[i] = max_{j > i} |v_i - v_j|^rho + V[j].
// Returns the best powered sum (before the final root). The input is an
// orbit sampled along decreasing times; a subsequence keeps that order.
inline double variation_operator_pow(std::span<const double> v, double rho) {
  if (!(rho > 2.0))
    throw std::domain_error("variation_operator: rho must be > 2");
  if (v.empty())
    throw std::invalid_argument("variation_operator: empty orbit");
  const std::size_t m = v.size();
  std::vector<double> V(m, 0.0);
  for (std::size_t ii = m - 1; ii-- > 0;) {
    double best = 0.0;
    for (std::size_t j = ii + 1; j < m; ++j) {
      double cand = std::pow(std::fabs(v[ii] - v[j]), rho) + V[j];
      if (cand > best) best = cand;
    }
    V[ii] = best;
  }
  double best = 0.0;
  for (double x : V) best = std::max(best, x);
  return best;
}

inline double variation_operator(std::span<const double> v, double rho) {
  return std::pow(variation_operator_pow(v, rho), 1.0 / rho);
}

// Norms of a semigroup orbit sampled on a decreasing time grid:
//   e_norm     sup of |values|                         (space E),
//   f_norm     sqrt of the log-t trapezoid of d^2      (space F),
//   e_rho_norm exact rho-variation of values           (space E_rho).
// d holds the t d/dt orbit used by the F-norm; logt_weights are the
// trapezoid weights of the log-t grid.
struct OrbitNorms {
  double e_norm = 0.0;
  double f_norm = 0.0;
  double e_rho_norm = 0.0;
  double rho = 3.0;
};

inline OrbitNorms orbit_norms(std::span<const double> values,
                              std::span<const double> d,
                              std::span<const double> logt_weights,
                              double rho) {
  if (values.empty()) throw std::invalid_argument("orbit_norms: empty orbit");
  OrbitNorms out;
  out.rho = rho;
  for (double x : values) out.e_norm = std::max(out.e_norm, std::fabs(x));
  if (!d.empty()) {
    if (d.size() != logt_weights.size())
      throw std::invalid_argument("orbit_norms: weight size mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j)
      acc += logt_weights[j] * d[j] * d[j];
    out.f_norm = std::sqrt(acc);
  }
  out.e_rho_norm = values.size() > 1 ? variation_operator(values, rho) : 0.0;
  return out;
}

// Trapezoid weights for a quadrature in log t over a decreasing t grid.
inline std::vector<double> logt_trapezoid_weights(std::span<const double> t) {
  std::vector<double> w(t.size(), 0.0);
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    double dl = std::fabs(std::log(t[j]) - std::log(t[j + 1]));
    w[j] += 0.5 * dl;
    w[j + 1] += 0.5 * dl;
  }
  return w;
}

}  // namespace hbmo
