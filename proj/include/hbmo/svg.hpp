#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace hbmo {

// Minimal SVG heatmap emitter for bound-ratio sweeps; pure text output.
class SvgHeatmap {
 public:
  SvgHeatmap(int nx, int ny) : nx_(nx), ny_(ny), v_(nx * ny, 0.0) {}

  void set(int ix, int iy, double value) { v_[iy * nx_ + ix] = value; }

  void write(std::ostream& os, const std::string& title) const {
    const int cell = 4, margin = 24;
    const int w = nx_ * cell + 2 * margin, h = ny_ * cell + 2 * margin + 16;
    double lo = v_[0], hi = v_[0];
    for (double x : v_) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (hi <= lo) hi = lo + 1.0;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
       << "\" height=\"" << h << "\">\n";
    os << "<text x=\"" << margin << "\" y=\"16\" font-size=\"12\" "
          "font-family=\"monospace\">"
       << title << "</text>\n";
    for (int iy = 0; iy < ny_; ++iy)
      for (int ix = 0; ix < nx_; ++ix) {
        double t = (v_[iy * nx_ + ix] - lo) / (hi - lo);
        os << "<rect x=\"" << margin + ix * cell << "\" y=\""
           << margin + 16 + (ny_ - 1 - iy) * cell << "\" width=\"" << cell
           << "\" height=\"" << cell << "\" fill=\"" << color(t) << "\"/>\n";
      }
    os << "</svg>\n";
  }

 private:
  static std::string color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    // dark blue -> teal -> yellow
    int r = static_cast<int>(255.0 * std::pow(t, 1.5));
    int g = static_cast<int>(255.0 * t);
    int b = static_cast<int>(96.0 + 128.0 * (1.0 - t));
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
  }

  int nx_, ny_;
  std::vector<double> v_;
};

}  // namespace hbmo
