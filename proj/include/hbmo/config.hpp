#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace hbmo {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One JSON document drives a run; command-line flags override single keys.
// Unknown keys are rejected so that configs stay reproducible.
struct RunConfig {
  int dimension = 1;
  double box_half_width = 6.0;
  int grid_points = 257;
  int time_grid_count = 128;
  double s_min = 1e-6;
  double s_max = 1.0 - 1e-6;
  double rho = 3.0;
  double tol = 1e-8;
  std::vector<std::string> operators;
  std::string output_dir = ".";
  unsigned long long seed = 1234;

  // verify-specific knobs
  double sweep_half_width = 6.0;
  int sweep_points = 128;
  double c_exponent = 0.0625;
  int t1_grid_points = 1025;
  double t1_grid_half_width = 6.5;
  int t1_centers = 49;

  nlohmann::json extra;  // command sections (kernel_eval, bmo, ...)
};

namespace detail {

inline void check_keys(const nlohmann::json& j,
                       const std::set<std::string>& allowed,
                       const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("config: unknown key \"" + it.key() + "\" in " +
                        where);
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  static const std::set<std::string> top = {
      "dimension",   "box_half_width", "grid_points", "time_grid",
      "rho",         "tol",            "operators",   "output_dir",
      "seed",        "verify",         "kernel_eval", "bmo",
      "operator_apply", "variation"};
  detail::check_keys(j, top, "top level");
  RunConfig c;
  c.dimension = j.value("dimension", c.dimension);
  c.box_half_width = j.value("box_half_width", c.box_half_width);
  c.grid_points = j.value("grid_points", c.grid_points);
  if (j.contains("time_grid")) {
    const auto& tg = j.at("time_grid");
    detail::check_keys(tg, {"count", "s_min", "s_max"}, "time_grid");
    c.time_grid_count = tg.value("count", c.time_grid_count);
    c.s_min = tg.value("s_min", c.s_min);
    c.s_max = tg.value("s_max", c.s_max);
  }
  c.rho = j.value("rho", c.rho);
  c.tol = j.value("tol", c.tol);
  if (j.contains("operators"))
    c.operators = j.at("operators").get<std::vector<std::string>>();
  c.output_dir = j.value("output_dir", c.output_dir);
  c.seed = j.value("seed", c.seed);
  if (j.contains("verify")) {
    const auto& v = j.at("verify");
    detail::check_keys(v,
                       {"sweep_half_width", "sweep_points", "c",
                        "t1_grid_points", "t1_grid_half_width", "t1_centers"},
                       "verify");
    c.sweep_half_width = v.value("sweep_half_width", c.sweep_half_width);
    c.sweep_points = v.value("sweep_points", c.sweep_points);
    c.c_exponent = v.value("c", c.c_exponent);
    c.t1_grid_points = v.value("t1_grid_points", c.t1_grid_points);
    c.t1_grid_half_width =
        v.value("t1_grid_half_width", c.t1_grid_half_width);
    c.t1_centers = v.value("t1_centers", c.t1_centers);
  }
  for (const char* sect : {"kernel_eval", "bmo", "operator_apply", "variation"})
    if (j.contains(sect)) c.extra[sect] = j.at(sect);

  if (c.dimension < 1) throw ConfigError("config: dimension must be >= 1");
  if (!(c.box_half_width > 0.0))
    throw ConfigError("config: box_half_width must be > 0");
  if (c.grid_points < 2) throw ConfigError("config: grid_points must be >= 2");
  if (c.time_grid_count < 1)
    throw ConfigError("config: time_grid count must be >= 1");
  if (!(c.s_min > 0.0 && c.s_max < 1.0 && c.s_min <= c.s_max))
    throw ConfigError("config: need 0 < s_min <= s_max < 1");
  if (!(c.rho > 2.0)) throw ConfigError("config: rho must be > 2");
  if (!(c.tol > 0.0 && c.tol < 1.0))
    throw ConfigError("config: tol must be in (0,1)");
  return c;
}

}  // namespace hbmo
