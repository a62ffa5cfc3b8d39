// Command-line front end: kernel evaluation, operator application, BMO
// estimates, variation fields and the verification suites, driven by one
// JSON config with flag overrides. Exit codes: 0 success, 1 numeric
// failure, 2 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hbmo/bmo.hpp"
#include "hbmo/config.hpp"
#include "hbmo/errors.hpp"
#include "hbmo/geometry.hpp"
#include "hbmo/grid_function.hpp"
#include "hbmo/hermite_basis.hpp"
#include "hbmo/mehler.hpp"
#include "hbmo/operators.hpp"
#include "hbmo/report_json.hpp"
#include "hbmo/riesz.hpp"
#include "hbmo/svg.hpp"
#include "hbmo/time_grid.hpp"
#include "hbmo/verify.hpp"

namespace fs = std::filesystem;
using hbmo::ordered_json;

namespace {

struct CliError {
  int code;
  std::string message;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json load_config_file(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw CliError{2, "cannot open config file: " + path};
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw CliError{2, std::string("config parse error: ") + e.what()};
  }
  return j;
}

hbmo::GridFunction make_builtin(const hbmo::RunConfig& cfg,
                                const nlohmann::json& spec) {
  const int n = cfg.dimension;
  const double L = cfg.box_half_width;
  const int m = cfg.grid_points;
  std::string id = spec.value("builtin", "");
  if (id == "constant") {
    double c = spec.value("value", 1.0);
    return hbmo::GridFunction::constant(n, L, m, c);
  }
  if (id == "coordinate")
    return hbmo::GridFunction::from_function(
        n, L, m, [](std::span<const double> x) { return x[0]; });
  if (id == "sin")
    return hbmo::GridFunction::from_function(
        n, L, m, [](std::span<const double> x) { return std::sin(x[0]); });
  if (id == "hermite") {
    std::vector<int> k = spec.value("k", std::vector<int>(n, 0));
    if (static_cast<int>(k.size()) != n)
      throw CliError{2, "builtin hermite: k must have n entries"};
    return hbmo::GridFunction::from_function(
        n, L, m,
        [&k](std::span<const double> x) { return hbmo::hermite_fn(k, x); });
  }
  if (id == "lemma21") {
    std::vector<double> x0 = spec.value("x0", std::vector<double>(n, 0.0));
    if (static_cast<int>(x0.size()) != n)
      throw CliError{2, "builtin lemma21: x0 must have n entries"};
    double g = hbmo::critical_radius(x0);
    double s = spec.value("s", g / 8.0);
    return hbmo::GridFunction::from_function(
        n, L, m, [&x0, s](std::span<const double> x) {
          return hbmo::test_function(x, s, x0);
        });
  }
  throw CliError{2, "unknown builtin function id: \"" + id + "\""};
}

hbmo::GridFunction load_input(const hbmo::RunConfig& cfg,
                              const nlohmann::json& spec) {
  if (spec.contains("builtin")) return make_builtin(cfg, spec);
  if (spec.contains("csv")) {
    std::string path = spec.at("csv").get<std::string>();
    std::ifstream in(path);
    if (!in) throw CliError{2, "cannot open input csv: " + path};
    try {
      return hbmo::GridFunction::read_csv(in, cfg.dimension,
                                          cfg.box_half_width,
                                          cfg.grid_points);
    } catch (const std::exception& e) {
      throw CliError{2, std::string("csv ingestion error: ") + e.what()};
    }
  }
  throw CliError{2, "input spec needs \"builtin\" or \"csv\""};
}

std::ofstream open_out(const hbmo::RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  fs::path p = fs::path(cfg.output_dir) / name;
  std::ofstream out(p);
  if (!out) throw CliError{2, "cannot open output file: " + p.string()};
  return out;
}

// ---- kernel-eval ----

int cmd_kernel_eval(const hbmo::RunConfig& cfg) {
  if (!cfg.extra.contains("kernel_eval"))
    throw CliError{2, "kernel-eval: missing \"kernel_eval\" config section"};
  const auto& sect = cfg.extra.at("kernel_eval");
  hbmo::detail::check_keys(sect, {"kernel", "points", "out"}, "kernel_eval");
  std::string kernel = sect.value("kernel", "");
  static const std::set<std::string> known = {"heat", "heat_meda", "heat_grad",
                                              "heat_ds", "heat_mass", "riesz"};
  if (!known.count(kernel))
    throw CliError{2, "kernel-eval: unknown kernel id \"" + kernel + "\""};
  const int n = cfg.dimension;

  std::ostringstream csv;
  csv << "s_or_t";
  for (int a = 1; a <= n; ++a) csv << ",x" << a;
  for (int a = 1; a <= n; ++a) csv << ",y" << a;
  csv << ",value\n";

  if (sect.contains("points")) {
    for (const auto& row : sect.at("points")) {
      if (!row.is_array() || static_cast<int>(row.size()) != 1 + 2 * n)
        throw CliError{2,
                       "kernel-eval: each point row must hold s_or_t, x1..xn, "
                       "y1..yn"};
      double s_or_t = row.at(0).get<double>();
      std::vector<double> x(n), y(n);
      for (int a = 0; a < n; ++a) x[a] = row.at(1 + a).get<double>();
      for (int a = 0; a < n; ++a) y[a] = row.at(1 + n + a).get<double>();
      double value = 0.0;
      if (kernel == "heat") {
        value = hbmo::heat_kernel(s_or_t, x, y);
      } else if (kernel == "heat_meda") {
        value = hbmo::heat_kernel_meda(hbmo::MedaParam(s_or_t), x, y);
      } else if (kernel == "heat_grad") {
        value = hbmo::heat_kernel_grad_x(hbmo::MedaParam(s_or_t), x, y)[0];
      } else if (kernel == "heat_ds") {
        value = hbmo::heat_kernel_ds(hbmo::MedaParam(s_or_t), x, y);
      } else if (kernel == "heat_mass") {
        value = hbmo::heat_action_on_one(hbmo::MedaParam(s_or_t), x);
      } else {  // riesz
        hbmo::RieszQuadPolicy pol;
        pol.abs_tol = cfg.tol;
        value = hbmo::riesz_kernel(1, x, y, pol);
      }
      csv << fmt17(s_or_t);
      for (int a = 0; a < n; ++a) csv << "," << fmt17(x[a]);
      for (int a = 0; a < n; ++a) csv << "," << fmt17(y[a]);
      csv << "," << fmt17(value) << "\n";
    }
  }
  std::string out_name = sect.value("out", "kernel_eval.csv");
  auto out = open_out(cfg, out_name);
  out << csv.str();
  std::cout << csv.str();
  return 0;
}

// ---- verify ----

hbmo::OperatorId parse_operator_id(const std::string& s) {
  if (s == "heat_orbit") return hbmo::OperatorId::HeatOrbit;
  if (s == "poisson_orbit") return hbmo::OperatorId::PoissonOrbit;
  if (s == "g_heat") return hbmo::OperatorId::GHeat;
  if (s == "riesz" || s == "riesz(1)") return hbmo::OperatorId::Riesz;
  if (s == "riesz_truncations" || s == "riesz_truncations(1)")
    return hbmo::OperatorId::RieszTruncations;
  if (s == "heat_variation" || s == "variation_family")
    return hbmo::OperatorId::HeatVariation;
  throw CliError{2, "unknown operator id \"" + s + "\""};
}

int cmd_verify(const hbmo::RunConfig& cfg, bool plots) {
  hbmo::SpaceContext ctx(cfg.dimension, cfg.box_half_width, cfg.tol);
  if (ctx.n != 1 && !cfg.operators.empty())
    throw CliError{2, "verify: suites are defined for dimension 1"};
  hbmo::TimeGrid grid =
      hbmo::TimeGrid::log_in_s(cfg.time_grid_count, cfg.s_min, cfg.s_max);
  hbmo::SweepSpec sweep{cfg.sweep_half_width, cfg.sweep_points};
  hbmo::T1Options t1opt;
  t1opt.grid_half_width = cfg.t1_grid_half_width;
  t1opt.grid_points = cfg.t1_grid_points;
  t1opt.center_half_width = cfg.sweep_half_width;
  t1opt.centers = cfg.t1_centers;
  t1opt.rho = cfg.rho;
  const double c = cfg.c_exponent;

  std::vector<hbmo::KernelBoundReport> bounds;
  std::vector<hbmo::T1Report> t1s;
  for (const std::string& name : cfg.operators) {
    hbmo::OperatorId id = parse_operator_id(name);
    switch (id) {
      case hbmo::OperatorId::HeatOrbit: {
        auto K = hbmo::heat_orbit_kernel(grid);
        bounds.push_back(hbmo::verify_size_bound(K, name, c, sweep,
                                                 hbmo::WeightForm::XForm));
        bounds.push_back(hbmo::verify_size_bound(K, name, c, sweep,
                                                 hbmo::WeightForm::YForm));
        bounds.push_back(hbmo::verify_smoothness_bound(K, name, 0.0, sweep));
        t1s.push_back(hbmo::verify_t1_conditions(id, ctx, grid,
                                                 hbmo::NormSpace::E, t1opt));
        break;
      }
      case hbmo::OperatorId::PoissonOrbit:
        t1s.push_back(hbmo::verify_t1_conditions(id, ctx, grid,
                                                 hbmo::NormSpace::E, t1opt));
        break;
      case hbmo::OperatorId::GHeat: {
        auto K = hbmo::g_heat_kernel(grid);
        bounds.push_back(hbmo::verify_size_bound(K, name, c, sweep,
                                                 hbmo::WeightForm::XForm));
        bounds.push_back(hbmo::verify_size_bound(K, name, c, sweep,
                                                 hbmo::WeightForm::YForm));
        bounds.push_back(hbmo::verify_smoothness_bound(K, name, 0.0, sweep));
        t1s.push_back(hbmo::verify_t1_conditions(id, ctx, grid,
                                                 hbmo::NormSpace::F, t1opt));
        break;
      }
      case hbmo::OperatorId::Riesz: {
        hbmo::RieszQuadPolicy pol;
        pol.abs_tol = std::max(cfg.tol, 1e-11);
        auto K = hbmo::riesz_scalar_kernel(pol);
        bounds.push_back(hbmo::verify_size_bound(K, name, c, sweep,
                                                 hbmo::WeightForm::XForm));
        bounds.push_back(hbmo::verify_size_bound(K, name, c, sweep,
                                                 hbmo::WeightForm::YForm));
        bounds.push_back(
            hbmo::verify_smoothness_bound(K, name, c, sweep,
                                          hbmo::WeightForm::YForm));
        t1s.push_back(hbmo::verify_t1_conditions(
            id, ctx, grid, hbmo::NormSpace::Scalar, t1opt));
        break;
      }
      case hbmo::OperatorId::RieszTruncations:
        t1s.push_back(hbmo::verify_t1_conditions(
            id, ctx, grid, hbmo::NormSpace::ERho, t1opt));
        break;
      case hbmo::OperatorId::HeatVariation: {
        auto K = hbmo::heat_variation_kernel(grid, cfg.rho);
        bounds.push_back(hbmo::verify_size_bound(K, name, c, sweep,
                                                 hbmo::WeightForm::XForm));
        bounds.push_back(hbmo::verify_size_bound(K, name, c, sweep,
                                                 hbmo::WeightForm::YForm));
        bounds.push_back(hbmo::verify_smoothness_bound(K, name, 0.0, sweep));
        t1s.push_back(hbmo::verify_t1_conditions(
            id, ctx, grid, hbmo::NormSpace::ERho, t1opt));
        break;
      }
    }
  }

  ordered_json prov;
  prov["dimension"] = cfg.dimension;
  prov["time_grid"] = {{"count", cfg.time_grid_count},
                       {"s_min", cfg.s_min},
                       {"s_max", cfg.s_max}};
  prov["sweep"] = {{"half_width", cfg.sweep_half_width},
                   {"points", cfg.sweep_points}};
  prov["c"] = c;
  prov["rho"] = cfg.rho;
  prov["tol"] = cfg.tol;
  prov["seed"] = cfg.seed;
  prov["operators"] = cfg.operators;
  hbmo::VerificationSummary sum =
      hbmo::assemble_report(bounds, t1s, {}, std::move(prov));

  auto out = open_out(cfg, "verify.json");
  out << sum.dump() << "\n";

  if (plots) {
    for (std::size_t bi = 0; bi < bounds.size(); ++bi) {
      const auto& rep = bounds[bi];
      if (rep.bound_id != "size") continue;
      int pts = 64;
      hbmo::SvgHeatmap map(pts, pts);
      auto K = [&]() -> hbmo::OrbitKernel {
        hbmo::OperatorId id = parse_operator_id(rep.operator_id);
        if (id == hbmo::OperatorId::HeatOrbit)
          return hbmo::heat_orbit_kernel(grid);
        if (id == hbmo::OperatorId::GHeat) return hbmo::g_heat_kernel(grid);
        if (id == hbmo::OperatorId::HeatVariation)
          return hbmo::heat_variation_kernel(grid, cfg.rho);
        return hbmo::riesz_scalar_kernel();
      }();
      hbmo::WeightForm form = rep.weight_form == "x"
                                  ? hbmo::WeightForm::XForm
                                  : hbmo::WeightForm::YForm;
      std::vector<double> orbit(K.orbit_len);
      for (int i = 0; i < pts; ++i)
        for (int j = 0; j < pts; ++j) {
          double x = -cfg.sweep_half_width +
                     2.0 * cfg.sweep_half_width * i / (pts - 1);
          double y = -cfg.sweep_half_width +
                     2.0 * cfg.sweep_half_width * j / (pts - 1);
          double v = 0.0;
          if (i != j) {
            try {
              K.eval(x, y, orbit);
              v = K.norm(orbit) * std::fabs(x - y) *
                  hbmo::detail::gauss_weight(c, form, x, y);
            } catch (const std::exception&) {
              v = 0.0;
            }
          }
          map.set(i, j, std::log1p(v));
        }
      std::string fname = "size_" + std::to_string(bi) + ".svg";
      auto svg = open_out(cfg, fname);
      map.write(svg, rep.operator_id + " size ratio (" + rep.weight_form +
                         "-form, log1p)");
    }
  }

  bool ok = true;
  for (const auto& r : bounds) {
    bool pass = r.converged && std::isfinite(r.fitted_C);
    std::cout << (pass ? "[pass] " : "[FAIL] ") << r.operator_id << " "
              << r.bound_id << " (" << r.weight_form
              << "-form): fitted_C = " << r.fitted_C << "\n";
    if (!pass) {
      std::cout << "  -> not converged: " << r.operator_id << " " << r.bound_id
                << "\n";
      ok = false;
    }
  }
  for (const auto& r : t1s) {
    std::cout << (r.finite ? "[pass] " : "[FAIL] ") << r.operator_id
              << " T1 in " << r.norm_space
              << ": cond_i = " << r.cond_i_sup
              << ", cond_ii = " << r.cond_ii_sup << "\n";
    if (!r.finite) ok = false;
  }
  return ok ? 0 : 1;
}

// ---- bmo-norm ----

int cmd_bmo_norm(const hbmo::RunConfig& cfg) {
  if (!cfg.extra.contains("bmo"))
    throw CliError{2, "bmo-norm: missing \"bmo\" config section"};
  const auto& sect = cfg.extra.at("bmo");
  hbmo::detail::check_keys(
      sect, {"input", "j_small_max", "thresholds", "multiplier"}, "bmo");
  hbmo::SpaceContext ctx(cfg.dimension, cfg.box_half_width, cfg.tol);
  hbmo::GridFunction f = load_input(cfg, sect.at("input"));
  hbmo::BmoOptions opt;
  opt.j_small_max = sect.value("j_small_max", opt.j_small_max);

  ordered_json j;
  hbmo::BmoEstimate est = hbmo::bmo_h_norm(f, ctx, opt);
  j["bmo_estimate"] = hbmo::to_json(est);
  if (sect.value("multiplier", false)) {
    hbmo::MultiplierThresholds thr;
    if (sect.contains("thresholds")) {
      thr.sup_norm = sect.at("thresholds").value("sup_norm", thr.sup_norm);
      thr.logosc_sup =
          sect.at("thresholds").value("logosc_sup", thr.logosc_sup);
    }
    j["multiplier"] = hbmo::to_json(hbmo::multiplier_check(f, ctx, thr, opt));
  }
  auto out = open_out(cfg, "bmo_norm.json");
  out << j.dump(2) << "\n";
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ---- operator-apply ----

int cmd_operator_apply(const hbmo::RunConfig& cfg) {
  if (!cfg.extra.contains("operator_apply"))
    throw CliError{2,
                   "operator-apply: missing \"operator_apply\" config section"};
  const auto& sect = cfg.extra.at("operator_apply");
  hbmo::detail::check_keys(sect, {"operator", "input", "s", "t", "eps", "out"},
                           "operator_apply");
  hbmo::GridFunction f = load_input(cfg, sect.at("input"));
  std::string op = sect.value("operator", "");
  hbmo::TimeGrid grid =
      hbmo::TimeGrid::log_in_s(cfg.time_grid_count, cfg.s_min, cfg.s_max);

  hbmo::GridFunction out = [&]() -> hbmo::GridFunction {
    if (op == "heat")
      return hbmo::apply_heat(f, hbmo::MedaParam(sect.value("s", 0.5)));
    if (op == "poisson")
      return hbmo::apply_poisson(f, sect.value("t", 1.0));
    if (op == "maximal_heat")
      return hbmo::maximal_operator(f, grid, hbmo::Semigroup::Heat);
    if (op == "maximal_poisson")
      return hbmo::maximal_operator(f, grid, hbmo::Semigroup::Poisson);
    if (op == "g_heat")
      return hbmo::g_function(f, grid, hbmo::Semigroup::Heat);
    if (op == "g_poisson")
      return hbmo::g_function(f, grid, hbmo::Semigroup::Poisson);
    if (op == "truncated_riesz")
      return hbmo::truncated_riesz(f, 1, sect.value("eps", 4.0 * f.h()));
    throw CliError{2, "operator-apply: unknown operator \"" + op + "\""};
  }();

  std::string out_name = sect.value("out", "operator_apply.csv");
  auto os = open_out(cfg, out_name);
  out.write_csv(os);
  return 0;
}

// ---- variation ----

int cmd_variation(const hbmo::RunConfig& cfg) {
  if (!cfg.extra.contains("variation"))
    throw CliError{2, "variation: missing \"variation\" config section"};
  const auto& sect = cfg.extra.at("variation");
  hbmo::detail::check_keys(sect, {"family", "input", "out"}, "variation");
  hbmo::GridFunction f = load_input(cfg, sect.at("input"));
  std::string fam = sect.value("family", "heat");
  hbmo::VariationFamily vf;
  if (fam == "heat")
    vf.kind = hbmo::VariationFamily::Heat;
  else if (fam == "poisson")
    vf.kind = hbmo::VariationFamily::Poisson;
  else if (fam == "riesz_truncations" || fam == "riesz_truncations(1)")
    vf.kind = hbmo::VariationFamily::RieszTruncations;
  else
    throw CliError{2, "variation: unknown family \"" + fam + "\""};
  hbmo::TimeGrid grid =
      hbmo::TimeGrid::log_in_s(cfg.time_grid_count, cfg.s_min, cfg.s_max);
  hbmo::GridFunction out = hbmo::variation_field(f, grid, vf, cfg.rho);
  std::string out_name = sect.value("out", "variation.csv");
  auto os = open_out(cfg, out_name);
  out.write_csv(os);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hermite-operator harmonic analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file");
  std::optional<int> ov_dim, ov_grid, ov_tcount;
  std::optional<double> ov_box, ov_rho, ov_tol, ov_smin, ov_smax;
  std::optional<std::string> ov_outdir;
  std::optional<unsigned long long> ov_seed;
  app.add_option("--dimension", ov_dim);
  app.add_option("--box", ov_box);
  app.add_option("--grid-points", ov_grid);
  app.add_option("--time-count", ov_tcount);
  app.add_option("--s-min", ov_smin);
  app.add_option("--s-max", ov_smax);
  app.add_option("--rho", ov_rho);
  app.add_option("--tol", ov_tol);
  app.add_option("--output-dir", ov_outdir);
  app.add_option("--seed", ov_seed);

  auto* sub_kernel = app.add_subcommand("kernel-eval", "evaluate a kernel");
  auto* sub_verify = app.add_subcommand("verify", "run verification suites");
  bool plots = false;
  sub_verify->add_flag("--plots", plots, "emit SVG heatmaps");
  auto* sub_bmo = app.add_subcommand("bmo-norm", "BMO estimate of a function");
  auto* sub_apply = app.add_subcommand("operator-apply", "apply an operator");
  auto* sub_var = app.add_subcommand("variation", "variation field");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    nlohmann::json raw = load_config_file(config_path);
    hbmo::RunConfig cfg;
    try {
      cfg = hbmo::parse_config(raw);
    } catch (const hbmo::ConfigError& e) {
      throw CliError{2, e.what()};
    }
    if (ov_dim) cfg.dimension = *ov_dim;
    if (ov_box) cfg.box_half_width = *ov_box;
    if (ov_grid) cfg.grid_points = *ov_grid;
    if (ov_tcount) cfg.time_grid_count = *ov_tcount;
    if (ov_smin) cfg.s_min = *ov_smin;
    if (ov_smax) cfg.s_max = *ov_smax;
    if (ov_rho) cfg.rho = *ov_rho;
    if (ov_tol) cfg.tol = *ov_tol;
    if (ov_outdir) cfg.output_dir = *ov_outdir;
    if (ov_seed) cfg.seed = *ov_seed;

    if (sub_kernel->parsed()) return cmd_kernel_eval(cfg);
    if (sub_verify->parsed()) return cmd_verify(cfg, plots);
    if (sub_bmo->parsed()) return cmd_bmo_norm(cfg);
    if (sub_apply->parsed()) return cmd_operator_apply(cfg);
    if (sub_var->parsed()) return cmd_variation(cfg);
    return 2;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const hbmo::AccuracyError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
