#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace hbmo {

namespace detail {
inline std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}
}  // namespace detail

// Quadrature or extrapolation did not reach the requested tolerance.
// Carries the error estimate that was actually achieved.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error estimate " +
                           detail::fmt_g(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

// The grid is too coarse for the requested operation (e.g. a ball that
// contains fewer than 2^n samples, or an excision radius below 2h).
class ResolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace hbmo
