#include "kahler/geodesy.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>

#include <Eigen/SVD>

namespace kahler::geodesy {

using model::KahlerChart;
using model::Tensor3;

double riemannian_norm2(const CMatrix& g, const CVector& v) { return 2.0 * model::norm2(g, v); }

CVector unit_tangent(const KahlerChart& chart, const Point& z, const CVector& v) {
  const double n2 = riemannian_norm2(chart.metric_raw(z), v);
  if (!(n2 > 0.0)) throw std::invalid_argument("unit_tangent: zero vector");
  return v / std::sqrt(n2);
}

std::string to_string(PathStatus s) {
  switch (s) {
    case PathStatus::complete: return "complete";
    case PathStatus::left_chart: return "left_chart";
    case PathStatus::hit_radius: return "hit_radius";
  }
  return "unknown";
}

namespace {

struct Joint {
  Point z;
  CVector v;
  CMatrix E;  // may be empty
};

// Γ^c_{ab} x^a y^b
CVector contract_gamma(const Tensor3& G, const CVector& x, const CVector& y) {
  const int n = G.dim();
  CVector out = CVector::Zero(n);
  for (int c = 0; c < n; ++c) {
    cplx s = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) s += G(c, a, b) * x(a) * y(b);
    out(c) = s;
  }
  return out;
}

Joint rhs(const KahlerChart& chart, const Joint& s) {
  const Tensor3 G = model::christoffel_at(chart, s.z);
  Joint d;
  d.z = s.v;
  d.v = -contract_gamma(G, s.v, s.v);
  if (s.E.size() > 0) {
    d.E.resize(s.E.rows(), s.E.cols());
    for (Eigen::Index k = 0; k < s.E.cols(); ++k) d.E.col(k) = -contract_gamma(G, s.v, s.E.col(k));
  }
  return d;
}

Joint axpy(const Joint& s, double h, const Joint& d) {
  Joint out;
  out.z = s.z + h * d.z;
  out.v = s.v + h * d.v;
  if (s.E.size() > 0) out.E = s.E + h * d.E;
  return out;
}

Joint rk4(const KahlerChart& chart, const Joint& s, double h) {
  const Joint k1 = rhs(chart, s);
  const Joint k2 = rhs(chart, axpy(s, 0.5 * h, k1));
  const Joint k3 = rhs(chart, axpy(s, 0.5 * h, k2));
  const Joint k4 = rhs(chart, axpy(s, h, k3));
  Joint out;
  out.z = s.z + (h / 6.0) * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
  out.v = s.v + (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
  if (s.E.size() > 0) out.E = s.E + (h / 6.0) * (k1.E + 2.0 * k2.E + 2.0 * k3.E + k4.E);
  return out;
}

// Modified Gram–Schmidt of `cand` columns against the Hermitian product
// h(x, y) = x^T g ȳ, keeping the first `keep` columns of `basis` fixed.
CMatrix gram_schmidt(const CMatrix& g, const CMatrix& cand, int n) {
  CMatrix out(n, n);
  int filled = 0;
  for (Eigen::Index k = 0; k < cand.cols() && filled < n; ++k) {
    CVector c = cand.col(k);
    for (int pass = 0; pass < 2; ++pass) {
      for (int b = 0; b < filled; ++b) c -= model::inner(g, c, out.col(b)) * out.col(b);
    }
    const double nn = model::norm2(g, c);
    if (nn < 1e-20) continue;
    out.col(filled++) = c / std::sqrt(nn);
  }
  if (filled < n) throw NumericalError("gram_schmidt: degenerate frame");
  return out;
}

}  // namespace

GeodesicPath integrate_geodesic(const ChartPtr& chart, const Point& z0, const CVector& v0,
                                double t_max, double step, std::optional<double> max_chart_radius) {
  if (!chart) throw std::invalid_argument("integrate_geodesic: null chart");
  if (!(step > 0.0)) throw std::invalid_argument("integrate_geodesic: step must be positive");
  if (!(t_max >= 0.0)) throw std::invalid_argument("integrate_geodesic: t_max must be >= 0");
  if (z0.size() != chart->complex_dim() || v0.size() != chart->complex_dim()) {
    throw std::invalid_argument("integrate_geodesic: dimension mismatch");
  }
  if (!chart->in_domain(z0)) throw std::invalid_argument("integrate_geodesic: z0 outside chart");
  const double speed2 = riemannian_norm2(chart->metric_raw(z0), v0);
  if (std::abs(speed2 - 1.0) > 1e-8) {
    throw std::invalid_argument("integrate_geodesic: v0 is not a unit tangent vector");
  }

  GeodesicPath path;
  path.chart = chart;
  path.step = step;
  path.samples.push_back({0.0, z0, v0});
  const auto nsteps = static_cast<long>(std::floor(t_max / step + 1e-9));
  Joint s{z0, v0, CMatrix()};
  for (long k = 1; k <= nsteps; ++k) {
    Joint next;
    try {
      next = rk4(*chart, s, step);
    } catch (const std::invalid_argument&) {
      path.status = PathStatus::left_chart;
      return path;
    } catch (const NumericalError&) {
      path.status = PathStatus::left_chart;
      return path;
    }
    if (!chart->in_domain(next.z)) {
      path.status = PathStatus::left_chart;
      return path;
    }
    const double sp = std::sqrt(riemannian_norm2(chart->metric_raw(next.z), next.v));
    path.max_renormalization = std::max(path.max_renormalization, std::abs(1.0 / sp - 1.0));
    next.v /= sp;
    s = next;
    path.samples.push_back({static_cast<double>(k) * step, s.z, s.v});
    if (max_chart_radius && s.z.norm() > *max_chart_radius) {
      path.status = PathStatus::hit_radius;
      return path;
    }
  }
  return path;
}

CMatrix adapted_frame(const KahlerChart& chart, const Point& z, const CVector& v,
                      const CMatrix& completion) {
  const int n = chart.complex_dim();
  const CMatrix g = chart.metric_raw(z);
  const CVector e1 = std::sqrt(2.0) * unit_tangent(chart, z, v);
  const CMatrix rest = completion.size() > 0 ? completion : CMatrix(CMatrix::Identity(n, n));
  CMatrix cand(n, 1 + rest.cols());
  cand.col(0) = e1;
  cand.rightCols(rest.cols()) = rest;
  CMatrix E = gram_schmidt(g, cand, n);
  E.col(0) = e1;
  return E;
}

ParallelFrame parallel_transport_frame(const GeodesicPath& path, const CMatrix& initial_frame) {
  if (path.samples.empty()) throw std::invalid_argument("parallel_transport_frame: empty path");
  const auto& chart = *path.chart;
  const int n = chart.complex_dim();
  if (initial_frame.rows() != n || initial_frame.cols() != n) {
    throw std::invalid_argument("parallel_transport_frame: frame must be n x n");
  }
  const auto& s0 = path.samples.front();
  const CMatrix g0 = chart.metric_raw(s0.z);
  if (model::unitarity_defect(g0, initial_frame) > 1e-10) {
    throw std::invalid_argument("parallel_transport_frame: initial frame not unitary");
  }
  if ((initial_frame.col(0) - std::sqrt(2.0) * s0.velocity).norm() > 1e-10) {
    throw std::invalid_argument("parallel_transport_frame: e_1 must equal (σ' - iJσ')/√2");
  }

  ParallelFrame out;
  out.frames.push_back(initial_frame);
  for (std::size_t k = 0; k + 1 < path.samples.size(); ++k) {
    const auto& a = path.samples[k];
    const auto& b = path.samples[k + 1];
    const Joint next = rk4(chart, Joint{a.z, a.velocity, out.frames.back()}, b.t - a.t);
    const CMatrix g = chart.metric_raw(b.z);
    CMatrix cand = next.E;
    cand.col(0) = std::sqrt(2.0) * b.velocity;
    CMatrix E = gram_schmidt(g, cand, n);
    E.col(0) = std::sqrt(2.0) * b.velocity;
    out.max_correction = std::max(out.max_correction, max_abs(E - next.E));
    out.max_unitarity_defect = std::max(out.max_unitarity_defect, model::unitarity_defect(g, E));
    out.frames.push_back(std::move(E));
  }
  return out;
}

TransportState state_at(const GeodesicPath& path, const ParallelFrame& frame, double t) {
  if (path.samples.empty()) throw std::invalid_argument("state_at: empty path");
  if (t < -1e-12 || t > path.t_end() + 1e-12) {
    throw std::out_of_range("state_at: t outside the integrated path");
  }
  auto k = static_cast<std::size_t>(std::floor(t / path.step + 1e-9));
  k = std::min(k, path.samples.size() - 1);
  const auto& s = path.samples[k];
  const double dt = t - s.t;
  if (std::abs(dt) < 1e-14) return {t, s.z, s.velocity, frame.at(k)};
  const Joint j = rk4(*path.chart, Joint{s.z, s.velocity, frame.at(k)}, dt);
  return {t, j.z, j.v, j.E};
}

double parallelism_residual(const GeodesicPath& path, const ParallelFrame& frame) {
  const auto& chart = *path.chart;
  const double h = path.step;
  double worst = 0.0;
  const std::size_t m = path.samples.size();
  for (std::size_t k = 2; k + 2 < m; ++k) {
    const CMatrix dE = (-frame.at(k + 2) + 8.0 * frame.at(k + 1) - 8.0 * frame.at(k - 1) +
                        frame.at(k - 2)) /
                       (12.0 * h);
    const auto& s = path.samples[k];
    const Tensor3 G = model::christoffel_at(chart, s.z);
    const CMatrix g = chart.metric_raw(s.z);
    for (Eigen::Index a = 0; a < dE.cols(); ++a) {
      const CVector cov = dE.col(a) + contract_gamma(G, s.velocity, frame.at(k).col(a));
      worst = std::max(worst, std::sqrt(model::norm2(g, cov)));
    }
  }
  return worst;
}

double speed_defect(const GeodesicPath& path) {
  double worst = 0.0;
  for (const auto& s : path.samples) {
    worst = std::max(worst,
                     std::abs(riemannian_norm2(path.chart->metric_raw(s.z), s.velocity) - 1.0));
  }
  return worst;
}

void write_path_csv(std::ostream& os, const GeodesicPath& path, const ParallelFrame* frame) {
  const int n = path.chart->complex_dim();
  os << "t";
  for (int i = 0; i < n; ++i) os << ",re_z" << i << ",im_z" << i;
  if (frame) {
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i) os << ",re_e" << a << "_" << i << ",im_e" << a << "_" << i;
  }
  os << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < path.samples.size(); ++k) {
    const auto& s = path.samples[k];
    os << s.t;
    for (int i = 0; i < n; ++i) os << "," << s.z(i).real() << "," << s.z(i).imag();
    if (frame) {
      const CMatrix& E = frame->at(k);
      for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i) os << "," << E(i, a).real() << "," << E(i, a).imag();
    }
    os << "\n";
  }
}

// ---------------------------------------------------------------------------

namespace {

void require_fs(double K, const CVector& v, const char* what) {
  if (!(K > 0.0)) throw std::invalid_argument(std::string(what) + ": K must be positive");
  if (v.norm() == 0.0) throw std::invalid_argument(std::string(what) + ": zero vector");
}

}  // namespace

double distance_fs(int n, double K, const CVector& z, const CVector& w) {
  require_fs(K, z, "distance_fs");
  require_fs(K, w, "distance_fs");
  if (z.size() != n + 1 || w.size() != n + 1) {
    throw std::invalid_argument("distance_fs: expected n+1 homogeneous coordinates");
  }
  const CVector zh = z / z.norm();
  const CVector wh = w / w.norm();
  const cplx c = zh.dot(wh);  // conjugate-linear in the first argument
  const double s = (wh - c * zh).norm();
  return std::sqrt(2.0 / K) * std::atan2(s, std::abs(c));
}

double distance_to_coordinate_subspace(double K, const CVector& xi,
                                       const std::vector<bool>& in_subspace) {
  require_fs(K, xi, "distance_to_coordinate_subspace");
  if (in_subspace.size() != static_cast<std::size_t>(xi.size())) {
    throw std::invalid_argument("distance_to_coordinate_subspace: mask size mismatch");
  }
  double in2 = 0.0, out2 = 0.0;
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    (in_subspace[static_cast<std::size_t>(i)] ? in2 : out2) += std::norm(xi(i));
  }
  return std::sqrt(2.0 / K) * std::atan2(std::sqrt(out2), std::sqrt(in2));
}

SubspaceDistances distance_to_subspace(int n, double K, int s, const CVector& xi) {
  if (s < 0 || s > n - 1) throw std::invalid_argument("distance_to_subspace: need 0 <= s <= n-1");
  if (xi.size() != n + 1) {
    throw std::invalid_argument("distance_to_subspace: expected n+1 homogeneous coordinates");
  }
  std::vector<bool> P(static_cast<std::size_t>(n + 1), false);
  for (int i = 0; i <= s; ++i) P[static_cast<std::size_t>(i)] = true;
  std::vector<bool> Q(P.size());
  for (std::size_t i = 0; i < P.size(); ++i) Q[i] = !P[i];
  return {distance_to_coordinate_subspace(K, xi, P), distance_to_coordinate_subspace(K, xi, Q)};
}

CVector chart_to_homogeneous(double K, const Point& z) {
  CVector xi(z.size() + 1);
  xi(0) = 1.0;
  xi.tail(z.size()) = std::sqrt(K) * z;
  return xi;
}

Point homogeneous_to_chart(double K, const CVector& xi) {
  if (std::abs(xi(0)) < 1e-300) {
    throw std::invalid_argument("homogeneous_to_chart: point lies on the hyperplane at infinity");
  }
  return xi.tail(xi.size() - 1) / (xi(0) * std::sqrt(K));
}

// ---------------------------------------------------------------------------

namespace {

Point shoot(const KahlerChart& chart, const Point& z0, const CVector& w, int steps) {
  Joint s{z0, w, CMatrix()};
  const double h = 1.0 / steps;
  for (int k = 0; k < steps; ++k) {
    s = rk4(chart, s, h);
    if (!chart.in_domain(s.z)) throw NumericalError("shoot: geodesic left the chart");
  }
  return s.z;
}

RVector residual(const KahlerChart& chart, const Point& z0, const Point& z1, const CVector& w,
                 int steps) {
  const Point end = shoot(chart, z0, w, steps);
  const int n = static_cast<int>(z0.size());
  RVector r(2 * n);
  for (int i = 0; i < n; ++i) {
    r(i) = (end(i) - z1(i)).real();
    r(n + i) = (end(i) - z1(i)).imag();
  }
  return r;
}

}  // namespace

ShootingResult distance_oracle(const KahlerChart& chart, const Point& z_from, const Point& z_to,
                               const ShootingOptions& opts) {
  if (!chart.in_domain(z_from) || !chart.in_domain(z_to)) {
    throw std::invalid_argument("distance_oracle: endpoints must lie in the chart");
  }
  const int n = chart.complex_dim();
  CVector w = z_to - z_from;
  ShootingResult best;
  best.initial_velocity = w;
  if (w.norm() == 0.0) return best;

  auto safe_residual = [&](const CVector& ww, RVector& out) {
    try {
      out = residual(chart, z_from, z_to, ww, opts.steps);
      return true;
    } catch (const std::exception&) {
      return false;
    }
  };

  RVector F;
  if (!safe_residual(w, F)) throw NumericalError("distance_oracle: initial guess leaves chart");
  double miss = F.norm();
  int it = 0;
  for (; it < opts.max_iterations && miss >= 0.1 * opts.tol; ++it) {
    RMatrix J(2 * n, 2 * n);
    const double delta = 1e-6 * (1.0 + w.norm());
    for (int k = 0; k < 2 * n; ++k) {
      CVector wp = w, wm = w;
      const cplx dir = k < n ? cplx(delta, 0.0) : cplx(0.0, delta);
      wp(k % n) += dir;
      wm(k % n) -= dir;
      RVector Fp, Fm;
      if (!safe_residual(wp, Fp) || !safe_residual(wm, Fm)) {
        throw NumericalError("distance_oracle: Jacobian probe left the chart; best miss " +
                             std::to_string(miss));
      }
      J.col(k) = (Fp - Fm) / (2.0 * delta);
    }
    Eigen::JacobiSVD<RMatrix> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-7);
    const RVector dx = -svd.solve(F);
    CVector dw(n);
    for (int i = 0; i < n; ++i) dw(i) = cplx(dx(i), dx(n + i));
    double lambda = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
      RVector Fn;
      const CVector wn = w + lambda * dw;
      if (safe_residual(wn, Fn) && Fn.norm() < miss) {
        w = wn;
        F = Fn;
        miss = Fn.norm();
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  best.initial_velocity = w;
  best.miss = miss;
  best.iterations = it;
  best.distance = std::sqrt(riemannian_norm2(chart.metric_raw(z_from), w));
  if (!(miss < opts.tol)) {
    throw NumericalError("distance_oracle: shooting did not converge; best miss " +
                         std::to_string(miss));
  }
  return best;
}

ShootingResult fs_distance_by_shooting(int n, double K, const CVector& xi, const CVector& omega,
                                       const ShootingOptions& opts) {
  require_fs(K, xi, "fs_distance_by_shooting");
  require_fs(K, omega, "fs_distance_by_shooting");
  const CVector a = xi / xi.norm();
  CVector b = omega / omega.norm();
  const cplx c = a.dot(b);
  if (std::abs(c) > 0.0) b *= std::conj(c) / std::abs(c);
  CVector m = a + b;
  m /= m.norm();
  // Householder reflection taking m to a phase multiple of e_0.
  const cplx phase = std::abs(m(0)) > 0.0 ? m(0) / std::abs(m(0)) : cplx(1.0, 0.0);
  CVector u = m;
  u(0) -= phase;
  CMatrix U = CMatrix::Identity(n + 1, n + 1);
  if (u.norm() > 1e-14) U -= 2.0 * u * u.adjoint() / u.squaredNorm();
  const auto chart = model::make_fubini_study(n, K);
  const Point za = homogeneous_to_chart(K, U * a);
  const Point zb = homogeneous_to_chart(K, U * b);
  return distance_oracle(*chart, za, zb, opts);
}

}  // namespace kahler::geodesy
