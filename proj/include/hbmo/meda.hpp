#pragma once

#include <cmath>
#include <stdexcept>

namespace hbmo {

// Time change t(s) = (1/2) log((1+s)/(1-s)) = atanh(s), a bijection from
// s in (0,1) onto t in (0,inf). All kernels are evaluated internally in the
// s variable; entry points taking a time t convert once.
struct MedaParam {
  double s;

  explicit MedaParam(double s_) : s(s_) {
    if (!(s > 0.0 && s < 1.0))
      throw std::domain_error("MedaParam: s must lie in (0,1)");
  }

  double time() const { return std::atanh(s); }

  static MedaParam from_time(double t) {
    if (!(t > 0.0)) throw std::domain_error("MedaParam: t must be > 0");
    double s = std::tanh(t);
    if (s >= 1.0) s = std::nextafter(1.0, 0.0);
    return MedaParam(s);
  }
};

inline double meda_time(double s) { return std::atanh(s); }
inline double meda_s_of_time(double t) { return std::tanh(t); }

// Composition in s: t(compose(s1,s2)) = t(s1) + t(s2).
inline double meda_compose(double s1, double s2) {
  return (s1 + s2) / (1.0 + s1 * s2);
}

}  // namespace hbmo
