#include "commands.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kahler/hessian.hpp"
#include "kahler/riccati.hpp"
#include "kahler/spectral.hpp"
#include "kahler/volume.hpp"

namespace kahler::cli {

using nlohmann::json;

namespace {

constexpr double kHalfDiameter = std::numbers::pi / std::numbers::sqrt2;

std::vector<double> grid(double a, double b, int m) {
  std::vector<double> g;
  for (int i = 0; i < m; ++i) g.push_back(a + (b - a) * i / (m - 1));
  return g;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

template <class T>
T get(const json& c, const char* key) {
  return c.at(key).get<T>();
}

model::ChartSpec space_spec(const json& c) {
  const auto space = get<std::string>(c, "space");
  const int n = get<int>(c, "n");
  const double K = get<double>(c, "K");
  if (space == "flat") return {"flat", n, 0.0, {}};
  if (space == "fs") return {"fubini_study", n, K, {}};
  if (space == "ch") return {"complex_hyperbolic", n, K, {}};
  model::ChartSpec p{"product", n, 0.0, {}};
  for (int i = 0; i < n; ++i) p.factors.push_back({"fubini_study", 1, K, {}});
  return p;
}

hessian::SubmanifoldSpec sub_spec(const json& c) {
  if (get<std::string>(c, "sub") == "point") return hessian::SubmanifoldSpec::point();
  const int n = get<int>(c, "n"), p = get<int>(c, "p");
  std::vector<int> axes;
  for (int j = n - p; j < n; ++j) axes.push_back(j);
  return hessian::SubmanifoldSpec::subvariety(axes);
}

double bisectional_floor(const model::ChartPtr& chart) {
  auto pts = model::sample_points(*chart, 32, 0.8, 11);
  pts.push_back(model::Point::Zero(chart->complex_dim()));
  return model::bisectional_lower_bound_estimate(*chart, pts, 8, 11).min_ratio;
}

json resolve_hessian(json c) {
  const auto space = get<std::string>(c, "space");
  require(space == "flat" || space == "fs" || space == "ch" || space == "product",
          "space must be one of flat, fs, ch, product");
  const int n = get<int>(c, "n");
  require(n >= 1 && n <= 6, "n must be in 1..6");
  require(space != "product" || n >= 2, "product needs n >= 2 (CP^1 factors)");
  if (c.at("K").is_null()) c["K"] = space == "flat" ? 0.0 : space == "ch" ? -1.0 : 1.0;
  const double K = get<double>(c, "K");
  require(space != "flat" || K == 0.0, "flat space needs K = 0");
  require(space != "fs" || K > 0.0, "fs needs K > 0");
  require(space != "ch" || K < 0.0, "ch needs K < 0");
  require(space != "product" || K > 0.0, "product factors need K > 0");

  const auto sub = get<std::string>(c, "sub");
  require(sub == "point" || sub == "subvariety", "sub must be point or subvariety");
  if (c.at("p").is_null()) c["p"] = sub == "point" ? 0 : 1;
  const int p = get<int>(c, "p");
  if (sub == "point") {
    require(p == 0, "point case needs p = 0");
  } else {
    require(p >= 1 && p <= n - 1, "subvariety needs 1 <= p <= n - 1");
    require(space != "product", "linear subvarieties are supported on space forms only");
  }
  if (c.at("K_bound").is_null()) c["K_bound"] = space == "product" ? 0.0 : K;
  const double Kb = get<double>(c, "K_bound");

  const double rmin = get<double>(c, "rmin"), rmax = get<double>(c, "rmax");
  const int points = get<int>(c, "points");
  const double eps = get<double>(c, "eps"), step = get<double>(c, "step");
  require(points >= 2 && points <= 2001, "points must be in 2..2001");
  require(rmin > 0.0 && rmax > rmin, "need 0 < rmin < rmax");
  require(step > 0.0 && step <= 0.05, "step must be in (0, 0.05]");
  require(eps > 0.0 && eps < rmin, "need 0 < eps < rmin");
  require(get<double>(c, "fd_h") > 0.0, "fd_h must be positive");
  (void)get<bool>(c, "fd");
  (void)get<bool>(c, "jacobi");
  if (space == "fs" || space == "product")
    require(rmax < kHalfDiameter / std::sqrt(K), "rmax beyond the conjugate radius of the space");
  if (Kb > 0.0)
    require(rmax < kHalfDiameter / std::sqrt(Kb), "rmax beyond the blow-up radius of the bound");
  if (space == "ch") require(rmax <= 20.0, "rmax must be <= 20 on complex hyperbolic space");

  const double floor = bisectional_floor(model::build_chart(space_spec(c)));
  require(Kb <= floor + 1e-6, "K_bound exceeds the bisectional curvature of the space (estimated " +
                                  std::to_string(floor) + ")");
  return c;
}

json resolve_riccati(json c) {
  const int inst = get<int>(c, "instances"), dim = get<int>(c, "dim");
  require(inst >= 1 && inst <= 100000, "instances must be in 1..100000");
  require(dim >= 1 && dim <= 8, "dim must be in 1..8");
  (void)get<std::uint64_t>(c, "seed");
  const double step = get<double>(c, "step");
  require(step > 0.0 && step <= 0.05, "step must be in (0, 0.05]");
  if (c.at("slack").is_null()) c["slack"] = hessian::verdict_slack(step);
  require(get<double>(c, "slack") > 0.0, "slack must be positive");
  return c;
}

json resolve_eigen(json c) {
  const auto mode = get<std::string>(c, "mode");
  require(mode == "radial" || mode == "mesh" || mode == "bochner",
          "mode must be radial, mesh or bochner");
  const int n = get<int>(c, "n"), s = get<int>(c, "s");
  require(n >= 1 && n <= 16, "n must be in 1..16");
  require(s >= 0 && s <= n - 1, "s must be in 0..n-1");
  if (c.at("r0").is_null()) c["r0"] = spectral::critical_radius(n, s);
  const double r0 = get<double>(c, "r0");
  require(r0 > 0.0 && r0 < kHalfDiameter, "r0 must be in (0, pi/sqrt2)");
  const int v = get<int>(c, "vertices");
  require(v >= 1000 && v <= 200000, "vertices must be in 1000..200000");
  (void)get<bool>(c, "write_off");
  return c;
}

json resolve_volume(json c) {
  const int n = get<int>(c, "n");
  require(n >= 1 && n <= 3, "n must be in 1..3");
  const double lambda = get<double>(c, "lambda");
  require(lambda > 0.0, "lambda must be positive");
  if (c.at("k1").is_null()) c["k1"] = n * lambda;
  if (c.at("k2").is_null()) c["k2"] = n * lambda;
  const double k1 = get<double>(c, "k1"), k2 = get<double>(c, "k2");
  require(k1 > 0.0 && k2 > 0.0, "k1, k2 must be positive");
  require(k1 <= k2, "need k1 <= k2");
  require(get<int>(c, "band_points") >= 2, "band_points must be >= 2");
  const int order = get<int>(c, "radial_order");
  require(order == 16 || order == 24 || order == 32 || order == 48 || order == 64,
          "radial_order must be 16, 24, 32, 48 or 64");
  require(get<int>(c, "angular_nodes") >= 1, "angular_nodes must be >= 1");
  return c;
}

json resolve_all(json c) {
  require(get<int>(c, "instances") >= 1, "instances must be >= 1");
  require(get<int>(c, "dim") >= 1 && get<int>(c, "dim") <= 8, "dim must be in 1..8");
  (void)get<std::uint64_t>(c, "seed");
  const double step = get<double>(c, "step");
  require(step > 0.0 && step <= 0.05, "step must be in (0, 0.05]");
  return c;
}

json failing_rows(const hessian::SweepResult& r) {
  json out = json::array();
  for (const auto& row : r.rows)
    for (const auto& v : row.verdicts)
      if (!v.holds)
        out.push_back({{"t", v.t},
                       {"source", hessian::to_string(v.computed_source)},
                       {"gap_min_eigenvalue", v.gap_min_eigenvalue}});
  return out;
}

Outcome run_hessian(const json& c) {
  Outcome o;
  o.config = c;
  hessian::SweepConfig cfg;
  cfg.space = space_spec(c);
  cfg.K_bound = get<double>(c, "K_bound");
  cfg.spec = sub_spec(c);
  cfg.t_grid = grid(get<double>(c, "rmin"), get<double>(c, "rmax"), get<int>(c, "points"));
  cfg.eps = get<double>(c, "eps");
  cfg.step = get<double>(c, "step");
  cfg.with_fd = get<bool>(c, "fd");
  cfg.with_jacobi = get<bool>(c, "jacobi");
  cfg.fd_h = get<double>(c, "fd_h");
  const auto sweep = hessian::run_sweep(cfg);
  o.result["sweep"] = hessian::to_json(sweep);
  o.ok = sweep.all_hold && sweep.max_constraint_residual < 1e-6;
  o.failures = failing_rows(sweep);
  if (sweep.max_constraint_residual >= 1e-6)
    o.failures.push_back({{"constraint_residual", sweep.max_constraint_residual}});

  const auto space = get<std::string>(c, "space");
  const bool equality_expected = space != "product" && cfg.K_bound == get<double>(c, "K");
  o.result["equality_expected"] = equality_expected;
  if (equality_expected) {
    const auto eq = hessian::equality_probe(cfg);
    o.result["equality"] = hessian::to_json(eq);
    if (!eq.equality) {
      o.ok = false;
      o.failures.push_back({{"equality_probe", hessian::to_json(eq)}});
    }
  }
  std::ostringstream csv;
  hessian::write_sweep_csv(csv, sweep);
  o.files["hessian.csv"] = csv.str();
  return o;
}

Outcome run_riccati(const json& c) {
  Outcome o;
  o.config = c;
  riccati::IntegrationOptions opts;
  opts.step = get<double>(c, "step");
  TolerancePolicy tol;
  tol.psd_slack = get<double>(c, "slack");
  const auto s = riccati::run_suite(get<int>(c, "instances"), get<int>(c, "dim"),
                                    get<std::uint64_t>(c, "seed"), tol, opts);
  const auto sc = riccati::scalar_checks(1.0, 1e-4, opts);
  const double scalar_err = std::max({sc.max_error_zero, sc.max_error_positive,
                                      sc.max_error_negative, sc.max_margin_error});
  o.result["suite"] = riccati::to_json(s);
  o.result["scalar"] = {{"max_error_zero", sc.max_error_zero},
                        {"max_error_positive", sc.max_error_positive},
                        {"max_error_negative", sc.max_error_negative},
                        {"max_margin_error", sc.max_margin_error}};
  o.ok = s.failures == 0 && s.hypothesis_violations == 0 && scalar_err <= 1e-7;
  if (s.failures > 0 || s.hypothesis_violations > 0)
    o.failures.push_back({{"worst_instance", s.worst_instance}, {"worst_margin", s.worst_margin},
                          {"failures", s.failures},
                          {"hypothesis_violations", s.hypothesis_violations}});
  if (scalar_err > 1e-7) o.failures.push_back({{"scalar_error", scalar_err}});
  return o;
}

Outcome run_eigen(const json& c) {
  Outcome o;
  o.config = c;
  const auto mode = get<std::string>(c, "mode");
  if (mode == "radial") {
    const int n = get<int>(c, "n"), s = get<int>(c, "s");
    const double r0 = get<double>(c, "r0");
    const bool critical = std::abs(r0 - spectral::critical_radius(n, s)) <= 1e-14;
    const auto r = spectral::radial_dirichlet_lambda1(n, s, r0);
    o.result["radial"] = spectral::to_json(r);
    o.result["critical_radius"] = critical;
    o.result["expected_lambda"] = critical ? json(n + 1) : json(nullptr);
    o.result["complementarity_defect"] =
        spectral::critical_radius(n, s) + spectral::critical_radius(n, n - 1 - s) - kHalfDiameter;
    o.ok = r.residual < 1e-3 && (!critical || std::abs(r.lambda - (n + 1)) <= 1e-6);
    if (!o.ok) o.failures.push_back({{"lambda", r.lambda}, {"residual", r.residual}});
  } else if (mode == "mesh") {
    const auto st = spectral::mesh_lambda1_cp1(get<int>(c, "vertices"));
    o.result["mesh"] = spectral::to_json(st);
    const double rel = std::abs(st.finest.lambda - 2.0) / 2.0;
    o.result["relative_error"] = rel;
    o.ok = rel <= 0.02 && st.observed_rate >= 1.8;
    if (!o.ok)
      o.failures.push_back({{"lambda1", st.finest.lambda}, {"observed_rate", st.observed_rate}});
    if (get<bool>(c, "write_off")) {
      std::ostringstream off;
      spectral::write_off(off, spectral::icosphere(st.levels.back().level, 1.0 / std::numbers::sqrt2));
      o.files["mesh.off"] = off.str();
    }
  } else {
    const auto b1 = spectral::bochner_identity_check(spectral::u_first, 2.0);
    const auto b2 = spectral::bochner_identity_check(spectral::u_second, 6.0);
    const auto eq = spectral::equality_case_checks(spectral::u_first);
    const auto neg = spectral::equality_case_checks([](const model::Point& z) {
      const double u = spectral::u_first(z);
      return u + u * u;
    });
    o.result["bochner_first"] = spectral::to_json(b1);
    o.result["bochner_second"] = spectral::to_json(b2);
    o.result["equality_case"] = spectral::to_json(eq);
    o.result["negative_control"] = spectral::to_json(neg);
    const bool control_fails = neg.uab_norm > 1e-2 && neg.phi_variation > 1e-2;
    o.ok = b1.residual < 1e-3 && b2.residual < 1e-3 && eq.uab_norm < 1e-4 &&
           eq.phi_variation < 1e-4 && control_fails;
    if (!o.ok)
      o.failures.push_back({{"bochner_first", b1.residual}, {"bochner_second", b2.residual},
                            {"uab_norm", eq.uab_norm}, {"phi_variation", eq.phi_variation},
                            {"negative_control_detected", control_fails}});
  }
  return o;
}

Outcome run_volume(const json& c) {
  Outcome o;
  o.config = c;
  const int n = get<int>(c, "n");
  const double lambda = get<double>(c, "lambda");
  const double k1 = get<double>(c, "k1"), k2 = get<double>(c, "k2");
  volume::QuadratureOptions q;
  q.radial_order = get<int>(c, "radial_order");
  q.angular_nodes = get<int>(c, "angular_nodes");
  const auto chart = model::make_fubini_study(n, lambda / (n + 1));
  const bool quadrature = n <= 2;
  double V = 0.0;
  bool quad_ok = true;
  if (quadrature) {
    const auto r = volume::volume_report(*chart, k1, k2, q);
    o.result["report"] = volume::to_json(r);
    quad_ok = r.relative_error <= 1e-3;
    V = r.V_formula;
    o.ok = r.band.holds;
  } else {
    const auto cf = volume::chern_factor(*chart);
    V = volume::formula_volume(n, cf.lambda);
    const auto band = volume::comparison_verdict(n, k1, k2, V);
    o.result["report"] = {{"n", n}, {"V_formula", V}, {"V_quadrature", nullptr},
                          {"chern_factor", volume::to_json(cf)}, {"band", volume::to_json(band)},
                          {"note", "quadrature skipped for n = 3; formula path only"}};
    o.ok = band.holds;
  }
  const auto sc = volume::scaling_law_check(n, {lambda, 2 * lambda, 4 * lambda}, quadrature, q);
  o.result["scaling"] = volume::to_json(sc);
  const auto neg = volume::chern_factor_from_scalar(-n * (n + 1.0), n);
  o.result["negative_case_algebra"] = {
      {"chern_factor", volume::to_json(neg)},
      {"note", "c1 < 0 has no compact model in the chart family; algebra only"}};
  const bool scale_ok = sc.formula_spread <= 1e-10 && sc.quadrature_spread <= 2e-3 &&
                        sc.mixed_deviation <= 2e-3;
  if (!o.ok) o.failures.push_back({{"band", o.result["report"]["band"]}});
  if (!quad_ok) o.failures.push_back({{"quadrature_relative_error", o.result["report"]["relative_error"]}});
  if (!scale_ok) o.failures.push_back({{"scaling", o.result["scaling"]}});
  o.ok = o.ok && quad_ok && scale_ok;
  std::ostringstream csv;
  volume::write_band_csv(csv, n, 0.5 * k1, 2.0 * k2, get<int>(c, "band_points"), V);
  o.files["volume_band.csv"] = csv.str();
  return o;
}

Outcome run_all(const json& c) {
  Outcome o;
  o.config = c;
  const double step = get<double>(c, "step");
  struct Part {
    std::string name, command;
    json overrides;
  };
  std::vector<Part> parts = {
      {"hessian_flat", "hessian", {{"space", "flat"}, {"n", 2}, {"rmin", 0.1}, {"rmax", 3.0}}},
      {"hessian_fs", "hessian", {{"space", "fs"}, {"n", 2}, {"K", 1.0}, {"rmax", 0.9 * kHalfDiameter}}},
      {"hessian_sub", "hessian",
       {{"space", "fs"}, {"n", 2}, {"K", 1.0}, {"sub", "subvariety"}, {"p", 1},
        {"rmax", 0.9 * kHalfDiameter}}},
      {"hessian_product", "hessian",
       {{"space", "product"}, {"n", 2}, {"K", 1.0}, {"K_bound", 0.0}, {"rmin", 0.05}, {"points", 40}}},
      {"riccati", "riccati",
       {{"instances", c.at("instances")}, {"dim", c.at("dim")}, {"seed", c.at("seed")}}},
      {"eigen_radial_1_0", "eigen", {{"mode", "radial"}, {"n", 1}, {"s", 0}}},
      {"eigen_radial_2_0", "eigen", {{"mode", "radial"}, {"n", 2}, {"s", 0}}},
      {"eigen_radial_2_1", "eigen", {{"mode", "radial"}, {"n", 2}, {"s", 1}}},
      {"eigen_radial_3_1", "eigen", {{"mode", "radial"}, {"n", 3}, {"s", 1}}},
      {"eigen_mesh", "eigen", {{"mode", "mesh"}, {"write_off", false}}},
      {"eigen_bochner", "eigen", {{"mode", "bochner"}}},
      {"volume_cp1", "volume", {{"n", 1}, {"lambda", 1.0}}},
      {"volume_cp2", "volume", {{"n", 2}, {"lambda", 3.0}, {"k1", 3.0}, {"k2", 9.0}}},
  };
  for (auto& p : parts) {
    json cfg = default_config(p.command);
    if (cfg.contains("step")) cfg["step"] = step;
    cfg.update(p.overrides);
    const Outcome sub = run_command(p.command, resolve_config(p.command, cfg));
    o.result[p.name] = {{"config", sub.config}, {"ok", sub.ok}, {"result", sub.result}};
    o.ok = o.ok && sub.ok;
    for (const auto& f : sub.failures) o.failures.push_back({{"part", p.name}, {"failure", f}});
    for (const auto& [file, text] : sub.files) o.files[p.name + "_" + file] = text;
  }
  return o;
}

}  // namespace

json default_config(const std::string& command) {
  if (command == "hessian")
    return {{"space", "fs"}, {"n", 2},          {"K", nullptr},     {"sub", "point"},
            {"p", nullptr},  {"K_bound", nullptr}, {"rmin", 0.1},    {"rmax", 2.0},
            {"points", 41},  {"eps", 1e-3},     {"step", 1e-3},     {"fd", true},
            {"jacobi", true}, {"fd_h", 1e-4}};
  if (command == "riccati")
    return {{"instances", 200}, {"dim", 4}, {"seed", 7}, {"step", 1e-3}, {"slack", nullptr}};
  if (command == "eigen")
    return {{"mode", "radial"}, {"n", 2}, {"s", 1}, {"r0", nullptr}, {"vertices", 10000},
            {"write_off", true}};
  if (command == "volume")
    return {{"n", 1},           {"lambda", 1.0},      {"k1", nullptr},    {"k2", nullptr},
            {"band_points", 41}, {"radial_order", 64}, {"angular_nodes", 8}};
  if (command == "all") return {{"seed", 7}, {"instances", 200}, {"dim", 4}, {"step", 1e-3}};
  throw ConfigError("unknown command '" + command + "'");
}

json resolve_config(const std::string& command, const json& raw) {
  const json defaults = default_config(command);
  require(raw.is_object(), "config must be a JSON object");
  for (const auto& [key, value] : raw.items())
    require(defaults.contains(key), "unknown config key '" + key + "' for " + command);
  json c = defaults;
  c.update(raw);
  try {
    if (command == "hessian") return resolve_hessian(c);
    if (command == "riccati") return resolve_riccati(c);
    if (command == "eigen") return resolve_eigen(c);
    if (command == "volume") return resolve_volume(c);
    return resolve_all(c);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Outcome run_command(const std::string& command, const json& config) {
  if (command == "hessian") return run_hessian(config);
  if (command == "riccati") return run_riccati(config);
  if (command == "eigen") return run_eigen(config);
  if (command == "volume") return run_volume(config);
  if (command == "all") return run_all(config);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace kahler::cli
