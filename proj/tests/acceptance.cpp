// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "kahler/geodesy.hpp"
#include "kahler/hessian.hpp"
#include "kahler/riccati.hpp"
#include "kahler/spectral.hpp"
#include "kahler/volume.hpp"

#ifndef KAHLER_CLI
#error "KAHLER_CLI must name the CLI binary"
#endif

namespace {

using namespace kahler;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kHalfDiameter = kPi / kSqrt2;

int failures = 0;

void line(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s AC%-2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::vector<double> grid(double a, double b, int m) {
  std::vector<double> g;
  for (int i = 0; i < m; ++i) g.push_back(a + (b - a) * i / (m - 1));
  return g;
}

hessian::SweepConfig sweep(model::ChartSpec space, double Kb, hessian::SubmanifoldSpec spec,
                           std::vector<double> t) {
  hessian::SweepConfig c;
  c.space = std::move(space);
  c.K_bound = Kb;
  c.spec = std::move(spec);
  c.t_grid = std::move(t);
  return c;
}

CMatrix diag2(cplx a, cplx b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

double max_gap(const hessian::SweepResult& r, hessian::Source src) {
  double g = 0.0;
  for (const auto& row : r.rows)
    for (const auto& v : row.verdicts)
      if (v.computed_source == src)
        g = std::max({g, std::abs(v.gap_min_eigenvalue), std::abs(v.gap_max_eigenvalue)});
  return g;
}

const model::ChartSpec kC2{"flat", 2, 0.0, {}};
const model::ChartSpec kCP2{"fubini_study", 2, 1.0, {}};
const model::ChartSpec kCP1{"fubini_study", 1, 1.0, {}};

hessian::SweepResult run1, run2, run3;

void ac1() {
  run1 = hessian::run_sweep(sweep(kC2, 0.0, hessian::SubmanifoldSpec::point(), grid(0.1, 3.0, 41)));
  double dev = 0.0, bound_dev = 0.0, holo = 0.0;
  for (const auto& row : run1.rows) {
    const CMatrix expect = diag2(0.5 / row.t, 1.0 / row.t);
    dev = std::max(dev, max_abs(row.riccati.mixed.matrix() - expect));
    bound_dev = std::max(bound_dev, max_abs(row.bound.bound_mixed.matrix() - expect));
    holo = std::max(holo, max_abs(row.riccati.holo.matrix() - diag2(-0.5 / row.t, 0.0)));
  }
  line(1, "flat equality on C^2",
       dev < 1e-6 && bound_dev < 1e-6 && holo < 1e-6 && run1.all_hold,
       fmt("mixed dev %.2e, bound dev %.2e, holo dev %.2e (tol 1e-6)", dev, bound_dev, holo));
}

void ac2() {
  const auto t = grid(0.1, 0.9 * kHalfDiameter, 41);
  auto cfg = sweep(kCP2, 1.0, hessian::SubmanifoldSpec::point(), t);
  run2 = hessian::run_sweep(cfg);
  const double gap = max_gap(run2, hessian::Source::riccati);
  double holo = 0.0;
  for (const auto& row : run2.rows) {
    const double h = -(kSqrt2 / 2.0) / std::tan(kSqrt2 * row.t);
    holo = std::max(holo, max_abs(row.riccati.holo.matrix() - diag2(h, 0.0)));
  }
  const auto setup = hessian::radial_setup(model::build_chart(kCP2), cfg.spec, model::Point::Zero(2),
                                           CVector::Unit(2, 0), t.back() + 0.01, 1e-3);
  double slice_m = 0.0, slice_h = 0.0;
  for (double s : t) {
    const auto st = geodesy::state_at(setup.path, setup.frame, s);
    const auto cs = model::curvature_slice_in_frame(*setup.chart, st.z, st.frame, 1e-8);
    slice_m = std::max(slice_m, max_abs(cs.mixed.matrix() - diag2(2.0, 1.0)));
    slice_h = std::max(slice_h, max_abs(cs.holo.matrix() - diag2(2.0, 0.0)));
  }
  line(2, "model equality on CP^2",
       gap < 1e-5 && holo < 1e-5 && slice_m < 1e-8 && slice_h < 1e-8,
       fmt("|gap| %.2e, holo dev %.2e (tol 1e-5); slices %.2e, %.2e (tol 1e-8)", gap, holo,
           slice_m, slice_h));
}

void ac3() {
  const double zero = kPi / (2.0 * kSqrt2);
  auto t = grid(0.1, 0.9 * kHalfDiameter, 41);
  t.push_back(zero);
  std::sort(t.begin(), t.end());
  const auto spec = hessian::SubmanifoldSpec::subvariety({1});
  run3 = hessian::run_sweep(sweep(kCP2, 1.0, spec, t));
  const double gap = max_gap(run3, hessian::Source::riccati);
  const double b11 = hessian::bound_at(1.0, zero, 2, spec).bound_mixed(0, 0).real();
  double c11 = 1.0;
  for (const auto& row : run3.rows)
    if (row.t == zero) c11 = row.riccati.mixed(0, 0).real();
  line(3, "CP^1 in CP^2 equality",
       gap < 1e-5 && std::abs(b11) < 1e-12 && std::abs(c11) < 1e-5 && run3.all_hold,
       fmt("|gap| %.2e (tol 1e-5); (1,1) at pi/(2 sqrt2): bound %.1e, computed %.2e", gap, b11, c11));
}

void ac4() {
  const model::ChartSpec prod{"product", 2, 0.0, {kCP1, kCP1}};
  auto t = grid(0.05, 2.0, 40);
  const auto r = hessian::run_sweep(sweep(prod, 0.0, hessian::SubmanifoldSpec::point(), t));
  double ric1 = 0.0, fd1 = 0.0, best = 1e9;
  for (const auto& row : r.rows) {
    if (std::abs(row.t - 1.0) > best) continue;
    best = std::abs(row.t - 1.0);
    for (const auto& v : row.verdicts) {
      if (v.computed_source == hessian::Source::riccati) ric1 = v.gap_max_eigenvalue;
      if (v.computed_source == hessian::Source::finite_difference) fd1 = v.gap_max_eigenvalue;
    }
  }
  line(4, "strict comparison on CP^1 x CP^1",
       r.all_hold && r.rows.size() == t.size() && best < 1e-12 && ric1 > 0.05 && fd1 > 0.05,
       fmt("all verdicts hold on (0,2]; gap eigenvalue at t=1: riccati %.4f, fd %.4f (need > 0.05)",
           ric1, fd1));
}

void ac5() {
  TolerancePolicy tol;
  tol.psd_slack = hessian::verdict_slack(1e-3);
  const auto s = riccati::run_suite(200, 4, 7, tol);
  const auto sc = riccati::scalar_checks();
  const double err = std::max({sc.max_error_zero, sc.max_error_positive, sc.max_error_negative,
                               sc.max_margin_error});
  line(5, "Riccati comparison suite",
       s.instances == 200 && s.failures == 0 && s.hypothesis_violations == 0 &&
           s.worst_margin >= -tol.psd_slack && err < 1e-7,
       fmt("200 instances, %g violations, worst margin %.2e (slack %.1e); scalar err %.2e",
           s.failures, s.worst_margin, tol.psd_slack, err));
}

void ac6() {
  const double spread = std::max({run1.oracle_spread, run2.oracle_spread, run3.oracle_spread});
  line(6, "oracle triangle", spread < 1e-4,
       fmt("max relative pairwise deviation %.2e / %.2e / %.2e (tol 1e-4)", run1.oracle_spread,
           run2.oracle_spread, run3.oracle_spread));
}

void ac7() {
  auto est = [](const model::ChartPtr& c) {
    const auto pts = model::sample_points(*c, 1000, 0.8, 17);
    return model::bisectional_lower_bound_estimate(*c, pts, 10, 17);
  };
  const auto fsr = est(model::make_fubini_study(2, 1.0));
  const auto flat = est(model::make_flat(2));
  const auto prod = est(model::make_product({model::make_fubini_study(1, 1.0),
                                             model::make_fubini_study(1, 1.0)}));
  line(7, "bisectional estimator",
       std::abs(fsr.min_ratio - 1.0) < 1e-6 && std::abs(flat.min_ratio) < 1e-8 &&
           std::abs(prod.min_ratio) < 1e-6 && fsr.evaluated >= 10000,
       fmt("FS %.9f, flat %.1e, product %.1e over %g quotients", fsr.min_ratio, flat.min_ratio,
           prod.min_ratio, static_cast<double>(fsr.evaluated)));
}

void ac8() {
  double lam = 0.0;
  const int cases[4][2] = {{1, 0}, {2, 0}, {2, 1}, {3, 1}};
  for (const auto& c : cases) {
    const auto r = spectral::radial_dirichlet_lambda1(c[0], c[1], spectral::critical_radius(c[0], c[1]));
    lam = std::max(lam, std::abs(r.lambda - (c[0] + 1)));
  }
  const double comp = std::max(
      std::abs(spectral::critical_radius(2, 0) + spectral::critical_radius(2, 1) - kHalfDiameter),
      std::abs(2.0 * spectral::critical_radius(3, 1) - kHalfDiameter));
  const auto mesh = spectral::mesh_lambda1_cp1(10000);
  const double mesh_rel = std::abs(mesh.finest.lambda - 2.0) / 2.0;
  const auto b1 = spectral::bochner_identity_check(spectral::u_first, 2.0);
  const auto b2 = spectral::bochner_identity_check(spectral::u_second, 6.0);
  const auto eq = spectral::equality_case_checks(spectral::u_first);
  const auto neg = spectral::equality_case_checks([](const model::Point& z) {
    const double u = spectral::u_first(z);
    return u + u * u;
  });
  const bool pass = lam < 1e-6 && comp < 1e-9 && mesh.levels.back().vertices >= 10000 &&
                    mesh_rel < 0.02 && mesh.observed_rate >= 1.8 && b1.residual < 1e-3 &&
                    b2.residual < 1e-3 && eq.uab_norm < 1e-4 && eq.phi_variation < 1e-4 &&
                    neg.uab_norm > 1e-2 && neg.phi_variation > 1e-2;
  std::ostringstream os;
  os.precision(3);
  os << "radial |lambda-(n+1)| " << lam << ", complementarity " << comp << "; mesh lambda1 "
     << mesh.finest.lambda << " at " << mesh.levels.back().vertices << " vertices, rate "
     << mesh.observed_rate << "; Bochner " << std::max(b1.residual, b2.residual) << "; u_ab "
     << eq.uab_norm << ", phi var " << eq.phi_variation << "; control u_ab " << neg.uab_norm;
  line(8, "spectral facts", pass, os.str());
}

void ac9() {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    CVector xi(4);
    for (int k = 0; k < 4; ++k) xi(k) = cplx(nd(rng), nd(rng));
    const auto d = geodesy::distance_to_subspace(3, 1.0, 1, xi);
    worst = std::max(worst, std::abs(d.r_P + d.r_Q - kHalfDiameter));
  }
  const CVector p0 = CVector::Unit(4, 0), q0 = CVector::Unit(4, 2);
  const double closed = geodesy::distance_fs(3, 1.0, p0, q0);
  const double shot = geodesy::fs_distance_by_shooting(3, 1.0, p0, q0).distance;
  line(9, "distance identities in CP^3",
       worst < 1e-12 && std::abs(closed - kHalfDiameter) < 1e-9 &&
           std::abs(shot - kHalfDiameter) < 1e-9,
       fmt("max |r_P + r_Q - pi/sqrt2| %.1e; d(P0,Q0) closed %.1e, shooting %.1e off", worst,
           std::abs(closed - kHalfDiameter), std::abs(shot - kHalfDiameter)));
}

void ac10() {
  const double v = volume::volume_quadrature(*model::make_fubini_study(1, 0.5));
  const double rel = std::abs(v / (4.0 * kPi) - 1.0);
  const auto sc = volume::scaling_law_check(1, {1.0, 2.0, 4.0}, true);
  const auto eq = volume::comparison_verdict(1, 2.0, 2.0, 2.0 * kPi);
  const auto strict = volume::comparison_verdict(1, 1.0, 3.0, 2.0 * kPi);
  const auto outside = volume::comparison_verdict(1, 1.0, 3.0, 5.0 * kPi);
  const bool bands = eq.holds && eq.lower_equal && eq.upper_equal &&
                     eq.message.find("rigidity") != std::string::npos && strict.holds &&
                     !strict.lower_equal && !strict.upper_equal && !outside.holds;
  line(10, "volume identities",
       rel < 1e-3 && sc.formula_spread < 1e-10 && sc.quadrature_spread < 2e-3 && bands,
       fmt("V(CP^1, Ric=w)/4pi - 1 = %.1e; scaling spread formula %.1e, quadrature %.1e; bands ",
           rel, sc.formula_spread, sc.quadrature_spread) +
           (bands ? "correct" : "wrong"));
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
  std::size_t nb = 0;
  for (const auto& e : fs::directory_iterator(b)) (void)e, ++nb;
  if (names.size() != nb || names.empty()) {
    why = "file sets differ";
    return false;
  }
  for (const auto& n : names) {
    std::ifstream fa(a / n, std::ios::binary), fb(b / n, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(fa)), {});
    const std::string sb((std::istreambuf_iterator<char>(fb)), {});
    if (sa != sb) {
      why = n + " differs";
      return false;
    }
  }
  why = std::to_string(names.size()) + " files identical";
  return true;
}

void ac11() {
  const fs::path base = fs::temp_directory_path() / "kahler_acceptance_determinism";
  fs::remove_all(base);
  const fs::path d1 = base / "a", d2 = base / "b";
  fs::create_directories(d1);
  fs::create_directories(d2);
  const std::string cli = KAHLER_CLI;
  const int e1 = std::system((cli + " all --seed 7 --out " + d1.string() + " > /dev/null").c_str());
  const int e2 = std::system((cli + " all --seed 7 --out " + d2.string() + " > /dev/null").c_str());
  std::string why;
  const bool same = e1 == 0 && e2 == 0 && same_tree(d1, d2, why);
  line(11, "deterministic reports", same,
       "two `all` runs: exit " + std::to_string(e1) + "/" + std::to_string(e2) + ", " + why);
  fs::remove_all(base);
}

}  // namespace

int main() {
  ac1();
  ac2();
  ac3();
  ac4();
  ac5();
  ac6();
  ac7();
  ac8();
  ac9();
  ac10();
  ac11();
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
