#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hbmo/space.hpp"

namespace hbmo {

// Scalar function sampled on the uniform lattice of [-L, L]^n with m points
// per axis (spacing h = 2L/(m-1)). Samples are stored row-major, last axis
// fastest.
class GridFunction {
 public:
  GridFunction(int n, double L, int m, std::vector<double> samples)
      : n_(n), L_(L), m_(m), v_(std::move(samples)) {
    if (n < 1) throw std::invalid_argument("GridFunction: n must be >= 1");
    if (!(L > 0.0)) throw std::invalid_argument("GridFunction: L must be > 0");
    if (m < 2) throw std::invalid_argument("GridFunction: m must be >= 2");
    std::size_t expect = 1;
    for (int i = 0; i < n; ++i) expect *= static_cast<std::size_t>(m);
    if (v_.size() != expect)
      throw std::invalid_argument("GridFunction: sample count mismatch");
    for (double s : v_)
      if (!std::isfinite(s))
        throw std::invalid_argument("GridFunction: non-finite sample");
  }

  static GridFunction constant(int n, double L, int m, double c) {
    std::size_t sz = 1;
    for (int i = 0; i < n; ++i) sz *= static_cast<std::size_t>(m);
    return GridFunction(n, L, m, std::vector<double>(sz, c));
  }

  template <class F>
  static GridFunction from_function(int n, double L, int m, F&& f) {
    std::size_t sz = 1;
    for (int i = 0; i < n; ++i) sz *= static_cast<std::size_t>(m);
    std::vector<double> v(sz);
    const double h = 2.0 * L / (m - 1);
    Point p(n);
    for (std::size_t idx = 0; idx < sz; ++idx) {
      std::size_t rest = idx;
      for (int a = n - 1; a >= 0; --a) {
        p[a] = -L + static_cast<double>(rest % m) * h;
        rest /= m;
      }
      v[idx] = f(std::span<const double>(p));
    }
    return GridFunction(n, L, m, std::move(v));
  }

  int dim() const { return n_; }
  double box_half_width() const { return L_; }
  int points_per_axis() const { return m_; }
  double h() const { return 2.0 * L_ / (m_ - 1); }
  std::size_t size() const { return v_.size(); }

  double coord(int i) const { return -L_ + i * h(); }

  // Index of the lattice node nearest to c along one axis.
  int axis_index(double c) const {
    int i = static_cast<int>(std::lround((c + L_) / h()));
    return std::min(std::max(i, 0), m_ - 1);
  }

  void point_of(std::size_t idx, Point& out) const {
    out.resize(n_);
    for (int a = n_ - 1; a >= 0; --a) {
      out[a] = coord(static_cast<int>(idx % m_));
      idx /= m_;
    }
  }

  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  std::span<const double> samples() const { return v_; }
  std::span<double> samples() { return v_; }

  bool same_grid(const GridFunction& o) const {
    return n_ == o.n_ && m_ == o.m_ && L_ == o.L_;
  }

  double max_abs() const {
    double m = 0.0;
    for (double s : v_) m = std::max(m, std::fabs(s));
    return m;
  }

  // CSV: one header row, then one row per sample, "x1,...,xn,value".
  void write_csv(std::ostream& os) const;
  static GridFunction read_csv(std::istream& is, int n, double L, int m);

 private:
  int n_;
  double L_;
  int m_;
  std::vector<double> v_;
};

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

inline void GridFunction::write_csv(std::ostream& os) const {
  for (int a = 0; a < n_; ++a) os << "x" << (a + 1) << ",";
  os << "value\n";
  Point p;
  for (std::size_t idx = 0; idx < v_.size(); ++idx) {
    point_of(idx, p);
    for (int a = 0; a < n_; ++a) os << detail::fmt17(p[a]) << ",";
    os << detail::fmt17(v_[idx]) << "\n";
  }
}

inline GridFunction GridFunction::read_csv(std::istream& is, int n, double L,
                                           int m) {
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("GridFunction csv: empty input");
  GridFunction g = GridFunction::constant(n, L, m, 0.0);
  std::vector<char> seen(g.size(), 0);
  std::size_t row = 1;
  Point expect;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    auto cells = detail::split_csv_row(line);
    if (cells.size() != static_cast<std::size_t>(n) + 1)
      throw std::invalid_argument("GridFunction csv: row " +
                                  std::to_string(row) + " has " +
                                  std::to_string(cells.size()) +
                                  " columns, expected " + std::to_string(n + 1));
    std::size_t idx = 0;
    for (int a = 0; a < n; ++a) {
      double c = std::stod(cells[a]);
      int i = g.axis_index(c);
      if (std::fabs(g.coord(i) - c) > 1e-9 * std::max(1.0, g.h()))
        throw std::invalid_argument("GridFunction csv: row " +
                                    std::to_string(row) +
                                    " coordinate off-lattice");
      idx = idx * m + static_cast<std::size_t>(i);
    }
    g[idx] = std::stod(cells[n]);
    seen[idx] = 1;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw std::invalid_argument("GridFunction csv: missing lattice row " +
                                  std::to_string(i));
  return g;
}

}  // namespace hbmo
