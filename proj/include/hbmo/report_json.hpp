#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hbmo/bmo.hpp"
#include "hbmo/verify.hpp"

namespace hbmo {

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const KernelBoundReport& r) {
  ordered_json j;
  j["operator"] = r.operator_id;
  j["bound"] = r.bound_id;
  j["c_used"] = r.c_used;
  j["weight_form"] = r.weight_form;
  j["fitted_C"] = r.fitted_C;
  j["fitted_C_coarse"] = r.fitted_C_coarse;
  j["worst_pair"] = {r.worst_pair[0], r.worst_pair[1]};
  if (r.has_z) j["worst_pair"].push_back(r.worst_pair[2]);
  j["sweep_size"] = r.sweep_size;
  j["eval_failures"] = r.eval_failures;
  j["converged"] = r.converged;
  j["sweep"] = {{"half_width", r.sweep_half_width},
                {"points", r.sweep_points}};
  j["norm_space"] = r.norm_space;
  j["orbit_len"] = r.orbit_len;
  if (r.rho > 0.0) j["rho"] = r.rho;
  return j;
}

inline ordered_json to_json(const T1Report& r) {
  ordered_json j;
  j["operator"] = r.operator_id;
  j["norm_space"] = r.norm_space;
  j["cond_i_sup"] = r.cond_i_sup;
  j["cond_ii_sup"] = r.cond_ii_sup;
  j["worst_i_center"] = r.worst_i_center;
  j["worst_ii_center"] = r.worst_ii_center;
  j["worst_ii_radius"] = r.worst_ii_radius;
  j["centers_used"] = r.centers_used;
  j["balls_skipped"] = r.balls_skipped;
  j["finite"] = r.finite;
  j["grid"] = {{"half_width", r.grid_half_width}, {"points", r.grid_points}};
  j["orbit_len"] = r.orbit_len;
  if (r.rho > 0.0) j["rho"] = r.rho;
  return j;
}

inline ordered_json to_json(const Ball& b) {
  return ordered_json{{"center", b.center}, {"radius", b.radius}};
}

inline ordered_json to_json(const BmoEstimate& e) {
  ordered_json j;
  j["osc_sup"] = e.osc_sup;
  j["mean_sup"] = e.mean_sup;
  j["norm"] = e.norm;
  if (e.worst_osc_ball) j["worst_osc_ball"] = to_json(*e.worst_osc_ball);
  if (e.worst_mean_ball) j["worst_mean_ball"] = to_json(*e.worst_mean_ball);
  j["balls_used"] = e.balls_used;
  j["balls_skipped"] = e.balls_skipped;
  j["converged"] = e.converged;
  return j;
}

inline ordered_json to_json(const MultiplierReport& r) {
  ordered_json j;
  j["sup_norm"] = r.sup_norm;
  j["logosc_sup"] = r.logosc_sup;
  j["passes"] = r.passes;
  if (r.worst_ball) j["worst_ball"] = to_json(*r.worst_ball);
  return j;
}

struct VerificationSummary {
  ordered_json body;

  std::string dump(int indent = 2) const { return body.dump(indent); }
  bool all_ok() const { return body.value("all_ok", false); }
};

// Deterministic aggregation: reports appear in input order, pass/fail per
// kernel-bound report (finite and converged) and per T1 report (finite).
inline VerificationSummary assemble_report(
    std::span<const KernelBoundReport> bounds,
    std::span<const T1Report> t1s,
    std::span<const BmoEstimate> bmos = {},
    ordered_json provenance = ordered_json::object()) {
  VerificationSummary s;
  s.body["kernel_bounds"] = ordered_json::array();
  s.body["t1"] = ordered_json::array();
  s.body["bmo"] = ordered_json::array();
  bool ok = true;
  for (const auto& r : bounds) {
    ordered_json j = to_json(r);
    bool pass = r.converged && std::isfinite(r.fitted_C);
    j["pass"] = pass;
    ok = ok && pass;
    s.body["kernel_bounds"].push_back(std::move(j));
  }
  for (const auto& r : t1s) {
    ordered_json j = to_json(r);
    j["pass"] = r.finite;
    ok = ok && r.finite;
    s.body["t1"].push_back(std::move(j));
  }
  for (const auto& e : bmos) {
    ordered_json j = to_json(e);
    bool pass = std::isfinite(e.norm);
    j["pass"] = pass;
    ok = ok && pass;
    s.body["bmo"].push_back(std::move(j));
  }
  s.body["provenance"] = std::move(provenance);
  s.body["all_ok"] = ok;
  return s;
}

}  // namespace hbmo
