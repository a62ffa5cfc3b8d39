#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "hbmo/meda.hpp"

namespace hbmo {

// Strictly decreasing s-parameters in (0,1); the corresponding times
// t(s_j) = atanh(s_j) then decrease toward zero, modelling the sequences
// over which maximal and variation operators take their supremum.
struct TimeGrid {
  std::vector<double> s_values;

  explicit TimeGrid(std::vector<double> s) : s_values(std::move(s)) {
    if (s_values.empty()) throw std::invalid_argument("TimeGrid: empty");
    for (std::size_t i = 0; i < s_values.size(); ++i) {
      if (!(s_values[i] > 0.0 && s_values[i] < 1.0))
        throw std::invalid_argument("TimeGrid: s values must lie in (0,1)");
      if (i > 0 && !(s_values[i] < s_values[i - 1]))
        throw std::invalid_argument("TimeGrid: s values must strictly decrease");
    }
  }

  // Log-spaced in s from s_max down to s_min (the default discretization of
  // the sup over decreasing sequences).
  static TimeGrid log_in_s(int count, double s_min = 1e-6,
                           double s_max = 1.0 - 1e-6) {
    if (count < 1) throw std::invalid_argument("TimeGrid: count must be >= 1");
    std::vector<double> s(count);
    if (count == 1) {
      s[0] = s_max;
    } else {
      double la = std::log(s_max), lb = std::log(s_min);
      for (int i = 0; i < count; ++i)
        s[i] = std::exp(la + (lb - la) * i / (count - 1));
    }
    return TimeGrid(std::move(s));
  }

  // Log-spaced in t = atanh(s); resolves both endpoints of (0,1) evenly in
  // log-time, which suits the L^2(dt/t) quadratures.
  static TimeGrid log_in_t(int count, double t_min = 1e-6, double t_max = 7.0) {
    if (count < 1) throw std::invalid_argument("TimeGrid: count must be >= 1");
    std::vector<double> s(count);
    if (count == 1) {
      s[0] = meda_s_of_time(t_max);
    } else {
      double la = std::log(t_max), lb = std::log(t_min);
      for (int i = 0; i < count; ++i) {
        double sv = meda_s_of_time(std::exp(la + (lb - la) * i / (count - 1)));
        s[i] = std::min(sv, std::nextafter(1.0, 0.0));
      }
    }
    return TimeGrid(std::move(s));
  }

  std::size_t size() const { return s_values.size(); }

  std::vector<double> times() const {
    std::vector<double> t(s_values.size());
    for (std::size_t i = 0; i < s_values.size(); ++i)
      t[i] = meda_time(s_values[i]);
    return t;
  }
};

}  // namespace hbmo
