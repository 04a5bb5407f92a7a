#include "kahler/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kahler/hessian.hpp"
#include "kahler/quadrature.hpp"

namespace kahler::spectral {

using model::Point;

double RadialProfile::delta_r(double r) const {
  const auto f = hessian::bound_functions(K, r);
  return f.F * (n - s) + 0.5 * f.G + f.H * s;
}

double critical_radius(int n, int s) {
  if (n < 1 || s < 0 || s > n - 1) throw std::invalid_argument("critical_radius: need 0 <= s <= n-1");
  return std::acos(static_cast<double>(2 * s + 1 - n) / (n + 1)) / std::numbers::sqrt2;
}

double candidate_eigenfunction(int n, int s, double r) {
  return std::cos(std::numbers::sqrt2 * r) + static_cast<double>(n - 2 * s - 1) / (n + 1);
}

namespace {

constexpr double kStart = 1e-6;
constexpr double kMaxStep = 5e-4;
constexpr double kGrade = 1.0 / 32.0;

struct Shot {
  bool crossed = false;
  std::vector<double> r, u, du;
};

// Regular solution from the Frobenius start u = 1 + c2 r², c2 = -λ/(2(n-s)).
Shot shoot(const RadialProfile& prof, double lambda, double r0, bool keep) {
  const double c2 = -lambda / (2.0 * (prof.n - prof.s));
  double r = kStart, u = 1.0 + c2 * r * r, du = 2.0 * c2 * r;
  auto acc = [&](double rr, double uu, double dd) {
    return -2.0 * (prof.delta_r(rr) * dd + lambda * uu);
  };
  Shot shot;
  if (keep) {
    shot.r.push_back(r);
    shot.u.push_back(u);
    shot.du.push_back(du);
  }
  while (r < r0) {
    double h = std::min({kMaxStep, kGrade * r, r0 - r});
    if (r0 - (r + h) < 1e-15) h = r0 - r;
    const double k1u = du, k1d = acc(r, u, du);
    const double k2u = du + 0.5 * h * k1d, k2d = acc(r + 0.5 * h, u + 0.5 * h * k1u, k2u);
    const double k3u = du + 0.5 * h * k2d, k3d = acc(r + 0.5 * h, u + 0.5 * h * k2u, k3u);
    const double rn = (r0 - (r + h) < 1e-15) ? r0 : r + h;
    const double k4u = du + h * k3d, k4d = acc(rn, u + h * k3u, k4u);
    u += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    du += (h / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    r = rn;
    if (keep) {
      shot.r.push_back(r);
      shot.u.push_back(u);
      shot.du.push_back(du);
    }
    if (u <= 0.0) {
      shot.crossed = true;
      if (!keep) return shot;
    }
  }
  return shot;
}

}  // namespace

SpectralResult radial_dirichlet_lambda1(int n, int s, double r0, double shooting_tol) {
  if (n < 1 || s < 0 || s > n - 1) {
    throw std::invalid_argument("radial_dirichlet_lambda1: need 0 <= s <= n-1");
  }
  if (!(r0 > 0.0) || !(r0 < std::numbers::pi / std::numbers::sqrt2)) {
    throw std::invalid_argument("radial_dirichlet_lambda1: need 0 < r0 < pi/sqrt(2)");
  }
  if (!(shooting_tol > 0.0)) throw std::invalid_argument("radial_dirichlet_lambda1: bad tolerance");
  const RadialProfile prof{n, s, 1.0};
  double lo = 0.0, hi = 1.0;
  while (!shoot(prof, hi, r0, false).crossed) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e7) {
      throw NumericalError("radial_dirichlet_lambda1: no sign change in bracket [0, " +
                           std::to_string(hi) + "]");
    }
  }
  while (hi - lo > shooting_tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (shoot(prof, mid, r0, false).crossed ? hi : lo) = mid;
  }
  SpectralResult res;
  res.method = "shooting";
  res.n = n;
  res.s = s;
  res.r0 = r0;
  res.lambda = 0.5 * (lo + hi);
  res.lambda_riemannian = 2.0 * res.lambda;

  const Shot shot = shoot(prof, res.lambda, r0, true);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 1; i + 1 < shot.r.size(); ++i) {
    if (shot.r[i] < 1e-3) continue;
    const double h1 = shot.r[i] - shot.r[i - 1], h2 = shot.r[i + 1] - shot.r[i];
    const double upp =
        2.0 * ((shot.u[i + 1] - shot.u[i]) / h2 - (shot.u[i] - shot.u[i - 1]) / h1) / (h1 + h2);
    const double lap = 0.5 * upp + prof.delta_r(shot.r[i]) * shot.du[i];
    num = std::max(num, std::abs(lap + res.lambda * shot.u[i]));
    den = std::max(den, std::abs(shot.u[i]));
  }
  res.residual = den > 0.0 ? num / den : 0.0;
  if (std::abs(r0 - critical_radius(n, s)) < 1e-9) {
    const double norm = candidate_eigenfunction(n, s, 0.0);
    double dev = 0.0;
    for (std::size_t i = 0; i < shot.r.size(); ++i) {
      dev = std::max(dev, std::abs(shot.u[i] - candidate_eigenfunction(n, s, shot.r[i]) / norm));
    }
    res.closed_form_deviation = dev;
  }
  const std::size_t stride = std::max<std::size_t>(1, shot.r.size() / 32);
  for (std::size_t i = 0; i < shot.r.size(); i += stride) res.samples.emplace_back(shot.r[i], shot.u[i]);
  return res;
}

// ---------------------------------------------------------------------------

double u_first(const Point& z) {
  const double q = std::norm(z(0));
  return (1.0 - q) / (1.0 + q);
}

double u_second(const Point& z) {
  const double u = u_first(z);
  return 0.5 * (3.0 * u * u - 1.0);
}

namespace {

const model::KahlerChart& cp1() {
  static const auto chart = model::make_fubini_study(1, 1.0);
  return *chart;
}

LocalJet jet_in_chart(const ChartFunction& u, const Point& z) {
  const double h = 1e-4;
  auto at = [&](double dx, double dy) {
    Point w = z;
    w(0) += cplx(dx, dy);
    return u(w);
  };
  const double f0 = at(0, 0);
  const double fxp = at(h, 0), fxm = at(-h, 0), fyp = at(0, h), fym = at(0, -h);
  const double ux = (fxp - fxm) / (2 * h), uy = (fyp - fym) / (2 * h);
  const double uxx = (fxp - 2 * f0 + fxm) / (h * h), uyy = (fyp - 2 * f0 + fym) / (h * h);
  const double uxy = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
  const cplx uz = 0.5 * cplx(ux, -uy);
  const cplx uzz = 0.25 * cplx(uxx - uyy, -2.0 * uxy);
  const double uzzb = 0.25 * (uxx + uyy);

  const auto& chart = cp1();
  const double g = chart.metric_raw(z)(0, 0).real();
  const cplx gamma = model::christoffel_at(chart, z)(0, 0, 0);
  const cplx R = model::curvature_tensor(chart, z)(0, 0, 0, 0);
  const double ric = R.real() / g;  // Ric_{11̄} = g^{11̄} R_{11̄11̄}
  LocalJet j;
  j.u = f0;
  j.grad2 = std::norm(uz) / g;
  j.hess2 = std::norm(uzz - gamma * uz) / (g * g);
  j.lap = uzzb / g;
  j.ric = ric * std::norm(uz) / (g * g);
  return j;
}

}  // namespace

LocalJet local_jet(const ChartFunction& u, const Point& z) {
  if (std::abs(z(0)) <= 1.0) return jet_in_chart(u, z);
  const ChartFunction flipped = [&u](const Point& w) {
    Point zz(1);
    zz(0) = 1.0 / w(0);
    return u(zz);
  };
  Point w(1);
  w(0) = 1.0 / z(0);
  return jet_in_chart(flipped, w);
}

namespace {

// Quadrature nodes over CP^1 (K = 1) in geodesic polar coordinates about 0:
// z = tan(r/√2) e^{iθ}, area element (1/√2) sin(√2 r) dr dθ.
template <class Fn>
void for_each_node(int radial_nodes, int angular_nodes, Fn&& fn) {
  const double rmax = std::numbers::pi / std::numbers::sqrt2;
  const GaussRule rule = gauss_legendre(radial_nodes, 0.0, rmax);
  const double dtheta = 2.0 * std::numbers::pi / angular_nodes;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double r = rule.x[i];
    const double rho = std::tan(r / std::numbers::sqrt2);
    const double wr = rule.w[i] * std::sin(std::numbers::sqrt2 * r) / std::numbers::sqrt2;
    for (int k = 0; k < angular_nodes; ++k) {
      const double th = (k + 0.5) * dtheta;
      Point z(1);
      z(0) = std::polar(rho, th);
      fn(z, wr * dtheta);
    }
  }
}

}  // namespace

BochnerCheck bochner_identity_check(const ChartFunction& u, double lambda, int radial_nodes,
                                    int angular_nodes) {
  BochnerCheck out;
  double grad = 0.0, hess = 0.0, ric = 0.0, umax = 0.0, emax = 0.0;
  for_each_node(radial_nodes, angular_nodes, [&](const Point& z, double w) {
    const LocalJet j = local_jet(u, z);
    if (!std::isfinite(j.grad2) || !std::isfinite(j.hess2)) {
      throw NumericalError("bochner_identity_check: quadrature diverged");
    }
    grad += w * j.grad2;
    hess += w * j.hess2;
    ric += w * j.ric;
    umax = std::max(umax, std::abs(j.u));
    emax = std::max(emax, std::abs(j.lap + lambda * j.u));
  });
  out.lhs = lambda * grad;
  out.rhs = hess + ric;
  const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.residual = scale > 1e-14 ? std::abs(out.lhs - out.rhs) / scale : 0.0;
  out.eigen_residual = umax > 0.0 ? emax / umax : emax;
  return out;
}

EqualityCaseReport equality_case_checks(const ChartFunction& u, int radial_nodes,
                                        int angular_nodes) {
  std::vector<double> phi, wts;
  EqualityCaseReport rep;
  for_each_node(radial_nodes, angular_nodes, [&](const Point& z, double w) {
    const LocalJet j = local_jet(u, z);
    rep.uab_norm = std::max(rep.uab_norm, std::sqrt(j.hess2));
    phi.push_back(j.lap + 2.0 * j.u);
    wts.push_back(w);
  });
  double mean = 0.0, area = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    mean += wts[i] * phi[i];
    area += wts[i];
  }
  mean /= area;
  for (double p : phi) rep.phi_variation = std::max(rep.phi_variation, std::abs(p - mean));
  return rep;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const SpectralResult& r) {
  nlohmann::json j{{"method", r.method},
                   {"n", r.n},
                   {"s", r.s},
                   {"r0", r.r0},
                   {"lambda", r.lambda},
                   {"lambda_riemannian", r.lambda_riemannian},
                   {"residual", r.residual}};
  j["closed_form_deviation"] =
      r.closed_form_deviation >= 0.0 ? nlohmann::json(r.closed_form_deviation) : nlohmann::json();
  return j;
}

nlohmann::json to_json(const MeshStudy& s) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : s.levels) {
    levels.push_back({{"level", l.level},
                      {"vertices", l.vertices},
                      {"lambda0", l.lambda0},
                      {"lambda1_complex", l.lambda1_complex},
                      {"riemannian", l.riemannian},
                      {"iterations", l.iterations}});
  }
  return {{"levels", levels},
          {"lambda1_complex", s.finest.lambda},
          {"lambda1_riemannian", s.finest.lambda_riemannian},
          {"richardson", s.richardson},
          {"observed_rate", s.observed_rate},
          {"cluster_ratio", s.cluster_ratio}};
}

nlohmann::json to_json(const BochnerCheck& b) {
  return {{"lhs", b.lhs},
          {"rhs", b.rhs},
          {"residual", b.residual},
          {"eigen_residual", b.eigen_residual}};
}

nlohmann::json to_json(const EqualityCaseReport& e) {
  return {{"uab_norm", e.uab_norm}, {"phi_variation", e.phi_variation}};
}

}  // namespace kahler::spectral
