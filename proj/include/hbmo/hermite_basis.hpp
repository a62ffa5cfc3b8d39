#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace hbmo {
namespace detail {

// Normalized Hermite function by the stable three-term recurrence
//   h_0 = pi^{-1/4} e^{-x^2/2},  h_1 = sqrt(2) x h_0,
//   h_{k+1} = x sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1}.
template <class R>
R hermite1d(int k, R x) {
  const R pi = std::numbers::pi_v<R>;
  R h0 = std::pow(pi, R(-0.25)) * std::exp(-x * x / 2);
  if (k == 0) return h0;
  R h1 = std::sqrt(R(2)) * x * h0;
  if (k == 1) return h1;
  R hm = h0, h = h1;
  for (int j = 1; j < k; ++j) {
    R hn = x * std::sqrt(R(2) / (j + 1)) * h - std::sqrt(R(j) / (j + 1)) * hm;
    hm = h;
    h = hn;
  }
  return h;
}

}  // namespace detail

using MultiIndex = std::vector<int>;

inline int multi_degree(std::span<const int> k) {
  int d = 0;
  for (int ki : k) {
    if (ki < 0) throw std::domain_error("hermite_fn: negative index");
    d += ki;
  }
  return d;
}

// Tensor Hermite function h_k(x) = prod_i h_{k_i}(x_i).
// Eigenfunction of H = -Laplace + |x|^2 with eigenvalue 2|k| + n.
// Evaluated through the long double recurrence so the returned double is
// correctly rounded; the basis serves as the oracle for spectral checks at
// relative 1e-6 on orbit values down to e^{-25}.
inline double hermite_fn(std::span<const int> k, std::span<const double> x,
                         int max_degree = 128) {
  if (k.size() != x.size())
    throw std::invalid_argument("hermite_fn: dimension mismatch");
  if (multi_degree(k) > max_degree)
    throw std::domain_error("hermite_fn: degree exceeds max_degree");
  long double acc = 1.0L;
  for (std::size_t i = 0; i < k.size(); ++i)
    acc *= detail::hermite1d<long double>(k[i], x[i]);
  return static_cast<double>(acc);
}

inline double hermite_fn(int k, double x, int max_degree = 128) {
  if (k < 0 || k > max_degree)
    throw std::domain_error("hermite_fn: index out of range");
  return static_cast<double>(detail::hermite1d<long double>(k, x));
}

struct HermiteBasis {
  int n;
  int max_degree;

  HermiteBasis(int n_, int max_degree_) : n(n_), max_degree(max_degree_) {
    if (n < 1 || max_degree < 0)
      throw std::invalid_argument("HermiteBasis: bad parameters");
  }

  double eigenvalue(std::span<const int> k) const {
    return 2.0 * multi_degree(k) + n;
  }

  double operator()(std::span<const int> k, std::span<const double> x) const {
    if (static_cast<int>(k.size()) != n)
      throw std::invalid_argument("HermiteBasis: wrong multi-index size");
    return hermite_fn(k, x, max_degree);
  }
};

}  // namespace hbmo
