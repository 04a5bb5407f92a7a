#include "kahler/hessian.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>

namespace kahler::hessian {

namespace {

constexpr double kSeriesCut = 1e-4;

// x cot x as a function of X2 = x² (negative X2 gives y coth y).
double xcotx(double X2) {
  if (std::abs(X2) < kSeriesCut) return 1.0 - X2 / 3.0 - X2 * X2 / 45.0;
  if (X2 > 0.0) {
    const double x = std::sqrt(X2);
    return x / std::tan(x);
  }
  const double y = std::sqrt(-X2);
  return y / std::tanh(y);
}

// y / sin y as a function of Y2 = y².
double ysiny(double Y2) {
  if (std::abs(Y2) < kSeriesCut) return 1.0 + Y2 / 6.0 + 7.0 * Y2 * Y2 / 360.0;
  if (Y2 > 0.0) {
    const double y = std::sqrt(Y2);
    return y / std::sin(y);
  }
  const double w = std::sqrt(-Y2);
  return w / std::sinh(w);
}

// x tan x as a function of X2 = x².
double xtanx(double X2) {
  if (std::abs(X2) < kSeriesCut) return X2 + X2 * X2 / 3.0 + 2.0 * X2 * X2 * X2 / 15.0;
  if (X2 > 0.0) {
    const double x = std::sqrt(X2);
    return x * std::tan(x);
  }
  const double y = std::sqrt(-X2);
  return -y * std::tanh(y);
}

}  // namespace

BoundFunctions bound_functions(double K, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("bound_functions: r must be > 0");
  if (!std::isfinite(K)) throw std::invalid_argument("bound_functions: K must be finite");
  if (K > 0.0 && std::sqrt(2.0 * K) * r >= std::numbers::pi) {
    throw std::invalid_argument("bound_functions: r beyond model diameter");
  }
  const double X2 = 0.5 * K * r * r;
  const double Y2 = 2.0 * K * r * r;
  return {xcotx(X2) / r, -ysiny(Y2) / r, -xtanx(X2) / r};
}

std::string describe(const SubmanifoldSpec& spec) {
  if (spec.kind == SubKind::point) return "point";
  std::ostringstream os;
  os << "subvariety(";
  for (std::size_t i = 0; i < spec.tangent_axes.size(); ++i) {
    os << (i ? "," : "") << spec.tangent_axes[i];
  }
  os << ")";
  return os.str();
}

namespace {

void validate_spec(int n, const SubmanifoldSpec& spec) {
  if (spec.kind == SubKind::point) {
    if (!spec.tangent_axes.empty()) throw std::invalid_argument("point spec has tangent axes");
    return;
  }
  if (spec.p() < 1 || spec.p() > n - 1) {
    throw std::invalid_argument("subvariety dimension must satisfy 1 <= p <= n-1");
  }
  std::vector<int> axes = spec.tangent_axes;
  std::sort(axes.begin(), axes.end());
  if (std::adjacent_find(axes.begin(), axes.end()) != axes.end() || axes.front() < 0 ||
      axes.back() >= n) {
    throw std::invalid_argument("subvariety axes must be distinct and within 0..n-1");
  }
}

bool is_tangent_axis(const SubmanifoldSpec& spec, int j) {
  return std::find(spec.tangent_axes.begin(), spec.tangent_axes.end(), j) !=
         spec.tangent_axes.end();
}

}  // namespace

double first_column_residual(const HessianPair& pair) {
  const CMatrix& B = pair.mixed.matrix();
  const CMatrix& C = pair.holo.matrix();
  return (C.col(0) + B.col(0)).cwiseAbs().maxCoeff();
}

HessianPair riccati_seed(int n, const SubmanifoldSpec& spec, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("riccati_seed: eps must be > 0");
  if (n < 1) throw std::invalid_argument("riccati_seed: n must be positive");
  validate_spec(n, spec);
  std::vector<double> d(static_cast<std::size_t>(n), 0.0);
  d[0] = 0.5 / eps;
  for (int i = 1; i < n - spec.p(); ++i) d[static_cast<std::size_t>(i)] = 1.0 / eps;
  CMatrix C = CMatrix::Zero(n, n);
  C(0, 0) = -0.5 / eps;
  return {eps, HermitianMatrix::diagonal(d), SymmetricComplexMatrix(C)};
}

RadialSetup radial_setup(const ChartPtr& chart, const SubmanifoldSpec& spec,
                         const Point& footpoint, const CVector& direction, double t_max,
                         double step) {
  if (!chart) throw std::invalid_argument("radial_setup: null chart");
  const int n = chart->complex_dim();
  validate_spec(n, spec);
  const CVector v = geodesy::unit_tangent(*chart, footpoint, direction);
  const CMatrix g = chart->metric_raw(footpoint);
  if (spec.kind == SubKind::linear_subvariety) {
    for (int j = 0; j < n; ++j) {
      if (!is_tangent_axis(spec, j) && std::abs(footpoint(j)) > 1e-12) {
        throw std::invalid_argument("radial_setup: footpoint not on S");
      }
    }
    for (int j : spec.tangent_axes) {
      const CVector axis = CVector::Unit(n, j);
      if (std::abs(model::inner(g, v, axis)) > 1e-10) {
        throw std::invalid_argument("radial_setup: direction not orthogonal to S");
      }
    }
  }
  CMatrix completion(n, n);
  int col = 0;
  for (int j = 0; j < n; ++j)
    if (!is_tangent_axis(spec, j)) completion.col(col++) = CVector::Unit(n, j);
  for (int j : spec.tangent_axes) completion.col(col++) = CVector::Unit(n, j);

  RadialSetup s;
  s.chart = chart;
  s.spec = spec;
  s.path = geodesy::integrate_geodesic(chart, footpoint, v, t_max, step);
  if (s.path.status != geodesy::PathStatus::complete) {
    throw NumericalError("radial_setup: geodesic stopped early (" +
                         geodesy::to_string(s.path.status) + ")");
  }
  s.frame = geodesy::parallel_transport_frame(
      s.path, geodesy::adapted_frame(*chart, footpoint, v, completion));
  return s;
}

// ---------------------------------------------------------------------------

namespace {

struct Slice {
  CMatrix mixed;
  CMatrix holo;
};

class SliceSource {
 public:
  SliceSource(const RadialSetup& setup, double scale) : setup_(setup), scale_(scale) {}

  const Slice& at(double t) {
    if (have_ && t == last_t_) return last_;
    const auto st = geodesy::state_at(setup_.path, setup_.frame, t);
    const auto cs = model::curvature_slice_in_frame(*setup_.chart, st.z, st.frame, 1e-8);
    last_ = {scale_ * cs.mixed.matrix(), scale_ * cs.holo.matrix()};
    last_t_ = t;
    have_ = true;
    return last_;
  }

 private:
  const RadialSetup& setup_;
  double scale_;
  bool have_ = false;
  double last_t_ = 0.0;
  Slice last_;
};

struct BC {
  CMatrix B;
  CMatrix C;
};

BC riccati_rhs(const BC& s, const Slice& k) {
  return {-s.B * s.B - s.C * s.C.conjugate() - 0.5 * k.mixed,
          -s.C * s.B.transpose() - s.B * s.C + 0.5 * k.holo};
}

// O(t) coefficients of the singular solution B = P_B/t + A_B t, C = P_C/t + A_C t.
BC first_order_terms(const HessianPair& seed, const Slice& k0) {
  const int n = seed.mixed.dim();
  const double eps = seed.t;
  BC A{CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double pi = seed.mixed(i, i).real() * eps;
      const double pj = seed.mixed(j, j).real() * eps;
      const double qi = seed.holo(i, i).real() * eps;
      const double qj = seed.holo(j, j).real() * eps;
      const double a = 1.0 + pi + pj;
      const cplx m = -0.5 * k0.mixed(i, j);
      const cplx nn = 0.5 * k0.holo(i, j);
      // x a + qi conj(y) + y qj = m ;  y a + qi conj(x) + x qj = nn
      Eigen::Matrix4d L;
      L << a + 0.0, 0.0, qi + qj, 0.0,        //
          0.0, a, 0.0, qj - qi,               //
          qi + qj, 0.0, a, 0.0,               //
          0.0, qj - qi, 0.0, a;
      Eigen::Vector4d rhs(m.real(), m.imag(), nn.real(), nn.imag());
      const Eigen::Vector4d sol = L.fullPivLu().solve(rhs);
      A.B(i, j) = cplx(sol(0), sol(1));
      A.C(i, j) = cplx(sol(2), sol(3));
    }
  }
  A.B = 0.5 * (A.B + A.B.adjoint()).eval();
  A.C = 0.5 * (A.C + A.C.transpose()).eval();
  return A;
}

struct RunOut {
  std::vector<HessianPair> pairs;
  std::string status = "complete";
};

RunOut integrate_pairs(const RadialSetup& setup, const std::vector<double>& times,
                       const EvolveOptions& opts, double step, double grade) {
  const int n = setup.chart->complex_dim();
  SliceSource slices(setup, opts.curvature_scale);
  const HessianPair seed = riccati_seed(n, setup.spec, opts.eps);
  BC s{seed.mixed.matrix(), seed.holo.matrix()};
  if (opts.first_order_seed) {
    const BC A = first_order_terms(seed, slices.at(0.0));
    s.B += opts.eps * A.B;
    s.C += opts.eps * A.C;
  }
  RunOut out;
  double t = opts.eps;
  for (double target : times) {
    while (t < target) {
      double h = std::min({step, grade * t, target - t});
      if (target - (t + h) < 1e-14) h = target - t;
      const BC k1 = riccati_rhs(s, slices.at(t));
      const BC s2{s.B + 0.5 * h * k1.B, s.C + 0.5 * h * k1.C};
      const BC k2 = riccati_rhs(s2, slices.at(t + 0.5 * h));
      const BC s3{s.B + 0.5 * h * k2.B, s.C + 0.5 * h * k2.C};
      const BC k3 = riccati_rhs(s3, slices.at(t + 0.5 * h));
      const double tn = (target - (t + h) < 1e-14) ? target : t + h;
      const BC s4{s.B + h * k3.B, s.C + h * k3.C};
      const BC k4 = riccati_rhs(s4, slices.at(tn));
      s.B += (h / 6.0) * (k1.B + 2.0 * k2.B + 2.0 * k3.B + k4.B);
      s.C += (h / 6.0) * (k1.C + 2.0 * k2.C + 2.0 * k3.C + k4.C);
      s.B = 0.5 * (s.B + s.B.adjoint()).eval();
      s.C = 0.5 * (s.C + s.C.transpose()).eval();
      t = tn;
      if (!s.B.allFinite() || !s.C.allFinite() || max_abs(s.B) > opts.pole_threshold) {
        out.status = "pole";
        return out;
      }
    }
    out.pairs.push_back({target, HermitianMatrix(s.B), SymmetricComplexMatrix(s.C)});
  }
  return out;
}

}  // namespace

HessianEvolution evolve_hessian(const RadialSetup& setup, const std::vector<double>& output_times,
                                const EvolveOptions& opts) {
  if (!(opts.step > 0.0) || !(opts.grade > 0.0)) {
    throw std::invalid_argument("evolve_hessian: step and grade must be positive");
  }
  if (!(opts.eps > 0.0)) throw std::invalid_argument("evolve_hessian: eps must be > 0");
  if (!std::is_sorted(output_times.begin(), output_times.end())) {
    throw std::invalid_argument("evolve_hessian: output times must be increasing");
  }
  if (!output_times.empty()) {
    if (!(output_times.front() > opts.eps)) {
      throw std::invalid_argument("evolve_hessian: eps must be below the first output time");
    }
    if (output_times.back() > setup.path.t_end() + 1e-12) {
      throw std::invalid_argument("evolve_hessian: output time beyond the integrated path");
    }
  }
  HessianEvolution ev;
  RunOut run = integrate_pairs(setup, output_times, opts, opts.step, opts.grade);
  ev.pairs = std::move(run.pairs);
  ev.status = run.status;
  for (const auto& p : ev.pairs) {
    ev.max_constraint_residual = std::max(ev.max_constraint_residual, first_column_residual(p));
  }
  if (ev.status != "complete") {
    ev.warnings.push_back("truncated at a pole of the mixed Hessian");
  }
  if (opts.check_order && ev.status == "complete" && !output_times.empty()) {
    const std::vector<double> last{output_times.back()};
    const RunOut h2 = integrate_pairs(setup, last, opts, opts.step / 2, opts.grade / 2);
    const RunOut h4 = integrate_pairs(setup, last, opts, opts.step / 4, opts.grade / 4);
    if (!h2.pairs.empty() && !h4.pairs.empty()) {
      const double d1 = max_abs(ev.pairs.back().mixed.matrix() - h2.pairs[0].mixed.matrix());
      const double d2 = max_abs(h2.pairs[0].mixed.matrix() - h4.pairs[0].mixed.matrix());
      if (d1 > 1e-12 && d2 > 1e-13) {
        ev.observed_order = std::log2(d1 / d2);
        if (*ev.observed_order < 3.5) {
          ev.warnings.push_back("observed order " + std::to_string(*ev.observed_order) +
                                " below 3.5; step may be too large");
        }
      }
    }
  }
  return ev;
}

// ---------------------------------------------------------------------------

BoundMatrices bound_at(double K, double t, int n, const SubmanifoldSpec& spec) {
  validate_spec(n, spec);
  const BoundFunctions f = bound_functions(K, t);
  std::vector<double> d(static_cast<std::size_t>(n), f.F);
  d[0] = f.F + 0.5 * f.G;
  for (int i = n - spec.p(); i < n; ++i) d[static_cast<std::size_t>(i)] = f.H;
  return {t, f, HermitianMatrix::diagonal(d)};
}

std::string to_string(Source s) {
  switch (s) {
    case Source::riccati: return "riccati";
    case Source::finite_difference: return "finite_difference";
    case Source::jacobi: return "jacobi";
    case Source::closed_form: return "closed_form";
  }
  return "unknown";
}

ComparisonVerdict verdict(const HessianPair& computed, const BoundMatrices& bound,
                          const TolerancePolicy& tol, Source source) {
  if (computed.mixed.dim() != bound.bound_mixed.dim()) {
    throw std::invalid_argument("verdict: frame dimension mismatch");
  }
  if (std::abs(computed.t - bound.t) > 1e-12) {
    throw std::invalid_argument("verdict: computed and bound refer to different t");
  }
  const auto ev = hermitian_eigenvalues(bound.bound_mixed - computed.mixed);
  ComparisonVerdict v;
  v.t = computed.t;
  v.computed_source = source;
  v.gap_min_eigenvalue = ev.front();
  v.gap_max_eigenvalue = ev.back();
  v.holds = v.gap_min_eigenvalue >= -tol.psd_slack;
  return v;
}

double verdict_slack(double step) { return 1e-5 + 10.0 * step * step; }

// ---------------------------------------------------------------------------

DistanceField distance_field(const ChartPtr& chart, const SubmanifoldSpec& spec,
                             const Point& footpoint) {
  const int n = chart->complex_dim();
  validate_spec(n, spec);
  if (const auto* prod = dynamic_cast<const model::ProductChart*>(chart.get())) {
    if (spec.kind != SubKind::point) {
      throw std::invalid_argument("distance_field: products support the point case only");
    }
    std::vector<DistanceField> parts;
    std::vector<std::pair<int, int>> ranges;
    for (std::size_t i = 0; i < prod->factors().size(); ++i) {
      const int off = prod->offset(i);
      const int m = prod->factors()[i]->complex_dim();
      parts.push_back(distance_field(prod->factors()[i], spec, footpoint.segment(off, m)));
      ranges.emplace_back(off, m);
    }
    return [parts, ranges](const Point& z) {
      double s = 0.0;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const double d = parts[i](z.segment(ranges[i].first, ranges[i].second));
        s += d * d;
      }
      return std::sqrt(s);
    };
  }
  const auto Kopt = chart->space_form_K();
  if (!Kopt) {
    if (spec.kind != SubKind::point) {
      throw std::invalid_argument("distance_field: general charts support the point case only");
    }
    return [chart, footpoint](const Point& z) {
      if ((z - footpoint).norm() == 0.0) return 0.0;
      return geodesy::distance_oracle(*chart, footpoint, z).distance;
    };
  }
  const double K = *Kopt;
  std::vector<bool> tangent(static_cast<std::size_t>(n), false);
  for (int j : spec.tangent_axes) tangent[static_cast<std::size_t>(j)] = true;
  const bool point = spec.kind == SubKind::point;
  if (K == 0.0) {
    return [=](const Point& z) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) {
        if (point || !tangent[static_cast<std::size_t>(j)]) s += std::norm(z(j) - footpoint(j));
      }
      return std::sqrt(2.0 * s);
    };
  }
  if (K > 0.0) {
    if (point) {
      const CVector xi0 = geodesy::chart_to_homogeneous(K, footpoint);
      return [=](const Point& z) {
        return geodesy::distance_fs(n, K, xi0, geodesy::chart_to_homogeneous(K, z));
      };
    }
    std::vector<bool> mask(static_cast<std::size_t>(n + 1), false);
    mask[0] = true;
    for (int j : spec.tangent_axes) mask[static_cast<std::size_t>(j + 1)] = true;
    return [=](const Point& z) {
      return geodesy::distance_to_coordinate_subspace(K, geodesy::chart_to_homogeneous(K, z),
                                                      mask);
    };
  }
  const double c = std::sqrt(-K);
  const double scale = std::sqrt(2.0) / c;
  if (point) {
    const CVector w0 = c * footpoint;
    return [=](const Point& z) {
      const CVector w = c * z;
      const double num = std::abs(1.0 - w0.dot(w));
      const double den = std::sqrt((1.0 - w0.squaredNorm()) * (1.0 - w.squaredNorm()));
      return scale * std::acosh(std::max(1.0, num / den));
    };
  }
  return [=](const Point& z) {
    const CVector w = c * z;
    double wt2 = 0.0;
    for (int j = 0; j < n; ++j)
      if (tangent[static_cast<std::size_t>(j)]) wt2 += std::norm(w(j));
    const double ch2 = (1.0 - wt2) / (1.0 - w.squaredNorm());
    return scale * std::acosh(std::sqrt(std::max(1.0, ch2)));
  };
}

HessianPair fd_hessian_oracle(const model::KahlerChart& chart, const DistanceField& r,
                              const Point& z, const CMatrix& frame, double h, double t) {
  const int n = chart.complex_dim();
  if (!(h > 0.0)) throw std::invalid_argument("fd_hessian_oracle: h must be positive");
  const int m = 2 * n;
  auto shifted = [&](int j, double a, int k, double b) {
    Point w = z;
    auto bump = [&](int idx, double amount) {
      if (idx < n)
        w(idx) += cplx(amount, 0.0);
      else
        w(idx - n) += cplx(0.0, amount);
    };
    if (j >= 0) bump(j, a);
    if (k >= 0) bump(k, b);
    if (!chart.in_domain(w)) {
      throw std::invalid_argument("fd_hessian_oracle: differencing across chart boundary");
    }
    return r(w);
  };
  const double f0 = shifted(-1, 0.0, -1, 0.0);
  RVector grad(m);
  RMatrix hess(m, m);
  for (int j = 0; j < m; ++j) {
    const double fp = shifted(j, h, -1, 0.0);
    const double fm = shifted(j, -h, -1, 0.0);
    grad(j) = (fp - fm) / (2.0 * h);
    hess(j, j) = (fp - 2.0 * f0 + fm) / (h * h);
  }
  for (int j = 0; j < m; ++j) {
    for (int k = j + 1; k < m; ++k) {
      const double v = (shifted(j, h, k, h) - shifted(j, h, k, -h) - shifted(j, -h, k, h) +
                        shifted(j, -h, k, -h)) /
                       (4.0 * h * h);
      hess(j, k) = v;
      hess(k, j) = v;
    }
  }
  CMatrix Hm(n, n), Hh(n, n);
  CVector d(n);
  for (int a = 0; a < n; ++a) {
    d(a) = 0.5 * cplx(grad(a), -grad(n + a));
    for (int b = 0; b < n; ++b) {
      const double xx = hess(a, b), yy = hess(n + a, n + b);
      const double xy = hess(a, n + b), yx = hess(n + a, b);
      Hm(a, b) = 0.25 * cplx(xx + yy, xy - yx);
      Hh(a, b) = 0.25 * cplx(xx - yy, -(xy + yx));
    }
  }
  const model::Tensor3 G = model::christoffel_at(chart, z);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) Hh(a, b) -= G(c, a, b) * d(c);
  const CMatrix B = frame.transpose() * Hm * frame.conjugate();
  const CMatrix C = frame.transpose() * Hh * frame;
  return {t, HermitianMatrix(B, 1e-8), SymmetricComplexMatrix(C, 1e-6)};
}

// ---------------------------------------------------------------------------

JacobiResult jacobi_oracle(const RadialSetup& setup, const std::vector<double>& output_times,
                           const JacobiOptions& opts) {
  if (!(opts.step > 0.0)) throw std::invalid_argument("jacobi_oracle: step must be positive");
  if (!std::is_sorted(output_times.begin(), output_times.end())) {
    throw std::invalid_argument("jacobi_oracle: output times must be increasing");
  }
  const int n = setup.chart->complex_dim();
  const int m = 2 * n - 1;
  SliceSource slices(setup, 1.0);

  // Real coordinates (a_1..a_n, b_1..b_n) with x = a + ib; a_1 is radial.
  std::vector<int> cidx;
  for (int k = 1; k < 2 * n; ++k) cidx.push_back(k);
  RMatrix Y = RMatrix::Zero(2 * n, m), Yp = RMatrix::Zero(2 * n, m);
  for (int j = 0; j < m; ++j) {
    const int c = cidx[static_cast<std::size_t>(j)];
    const int alpha = c % n;
    const bool tangent = alpha >= n - setup.spec.p();
    (tangent ? Y : Yp)(c, j) = 1.0;
  }
  auto accel = [&](const RMatrix& X, const Slice& k) {
    RMatrix A(2 * n, m);
    for (int j = 0; j < m; ++j) {
      const CVector x = X.col(j).head(n).cast<cplx>() + cplx(0, 1) * X.col(j).tail(n).cast<cplx>();
      const CVector xpp = 0.5 * (k.holo.conjugate() * x.conjugate() - k.mixed.transpose() * x);
      A.col(j).head(n) = xpp.real();
      A.col(j).tail(n) = xpp.imag();
    }
    return A;
  };

  JacobiResult res;
  double t = 0.0;
  for (double target : output_times) {
    if (target > setup.path.t_end() + 1e-12) {
      throw std::invalid_argument("jacobi_oracle: output time beyond the integrated path");
    }
    while (t < target) {
      double h = std::min(opts.step, target - t);
      if (target - (t + h) < 1e-14) h = target - t;
      const double tn = (target - (t + h) < 1e-14) ? target : t + h;
      const RMatrix k1v = Yp, k1a = accel(Y, slices.at(t));
      const RMatrix k2v = Yp + 0.5 * h * k1a, k2a = accel(Y + 0.5 * h * k1v, slices.at(t + 0.5 * h));
      const RMatrix k3v = Yp + 0.5 * h * k2a, k3a = accel(Y + 0.5 * h * k2v, slices.at(t + 0.5 * h));
      const RMatrix k4v = Yp + h * k3a, k4a = accel(Y + h * k3v, slices.at(tn));
      Y += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      Yp += (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
      t = tn;
    }
    RMatrix Xc(m, m), Xp(m, m);
    for (int i = 0; i < m; ++i) {
      Xc.row(i) = Y.row(cidx[static_cast<std::size_t>(i)]);
      Xp.row(i) = Yp.row(cidx[static_cast<std::size_t>(i)]);
    }
    Eigen::JacobiSVD<RMatrix> svd(Xc);
    const auto& sv = svd.singularValues();
    if (!(sv(m - 1) > 0.0) || sv(0) / sv(m - 1) > opts.max_condition) {
      res.status = "conjugate_point";
      return res;
    }
    const RMatrix S = Xp * Xc.inverse();
    RMatrix hfull = RMatrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        hfull(cidx[static_cast<std::size_t>(i)], cidx[static_cast<std::size_t>(j)]) =
            S(i, j) + S(j, i);
    CMatrix B(n, n), C(n, n);
    const cplx I(0.0, 1.0);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const double uu = hfull(a, b), uv = hfull(a, n + b), vu = hfull(n + a, b),
                     vv = hfull(n + a, n + b);
        B(a, b) = 0.25 * (uu + I * uv - I * vu + vv);
        C(a, b) = 0.25 * (uu - I * uv - I * vu - vv);
      }
    }
    res.pairs.push_back({target, HermitianMatrix(B, 1e-8), SymmetricComplexMatrix(C, 1e-8)});
  }
  return res;
}

// ---------------------------------------------------------------------------

double relative_deviation(const CMatrix& a, const CMatrix& b) {
  return max_abs(a - b) / std::max(1.0, max_abs(a));
}

namespace {

RadialSetup setup_for(const SweepConfig& cfg, const ChartPtr& chart) {
  const int n = chart->complex_dim();
  validate_spec(n, cfg.spec);
  int axis = -1;
  for (int j = 0; j < n && axis < 0; ++j)
    if (!is_tangent_axis(cfg.spec, j)) axis = j;
  const double t_max = cfg.t_grid.empty() ? cfg.step : cfg.t_grid.back() + 2.0 * cfg.step;
  return radial_setup(chart, cfg.spec, Point::Zero(n), CVector::Unit(n, axis), t_max, cfg.step);
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  if (cfg.t_grid.empty()) throw std::invalid_argument("run_sweep: empty t grid");
  const ChartPtr chart = model::build_chart(cfg.space);
  const int n = chart->complex_dim();
  const RadialSetup setup = setup_for(cfg, chart);

  SweepResult res;
  res.config = cfg;
  res.psd_slack = verdict_slack(cfg.step);
  TolerancePolicy tol;
  tol.psd_slack = res.psd_slack;

  EvolveOptions eo;
  eo.eps = cfg.eps;
  eo.step = cfg.step;
  eo.check_order = true;
  const HessianEvolution ev = evolve_hessian(setup, cfg.t_grid, eo);
  res.evolution_status = ev.status;
  res.warnings = ev.warnings;
  res.max_constraint_residual = ev.max_constraint_residual;

  const std::size_t rows = ev.pairs.size();
  std::vector<std::optional<HessianPair>> fd(rows), jac(rows);
  std::vector<double> fd_err(rows, 0.0);
  if (cfg.with_fd) {
    const DistanceField r = distance_field(chart, cfg.spec, Point::Zero(n));
    const auto count = static_cast<long>(rows);
#pragma omp parallel for schedule(dynamic) if (cfg.exec == Exec::parallel)
    for (long i = 0; i < count; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double t = cfg.t_grid[k];
      const auto st = geodesy::state_at(setup.path, setup.frame, t);
      fd[k] = fd_hessian_oracle(*chart, r, st.z, st.frame, cfg.fd_h, t);
      // O(h²) truncation estimate from a second evaluation at 2h
      const auto coarse = fd_hessian_oracle(*chart, r, st.z, st.frame, 2.0 * cfg.fd_h, t);
      fd_err[k] = max_abs(fd[k]->mixed.matrix() - coarse.mixed.matrix()) / 3.0;
    }
  }
  if (cfg.with_jacobi) {
    const std::vector<double> times(cfg.t_grid.begin(),
                                    cfg.t_grid.begin() + static_cast<long>(rows));
    const JacobiResult jr = jacobi_oracle(setup, times, {cfg.step});
    for (std::size_t i = 0; i < jr.pairs.size(); ++i) jac[i] = jr.pairs[i];
    if (jr.status != "complete") res.warnings.push_back("jacobi oracle: " + jr.status);
  }

  for (std::size_t i = 0; i < rows; ++i) {
    SweepRow row;
    row.t = cfg.t_grid[i];
    row.bound = bound_at(cfg.K_bound, row.t, n, cfg.spec);
    row.riccati = ev.pairs[i];
    row.fd = fd[i];
    row.jacobi = jac[i];
    row.verdicts.push_back(verdict(row.riccati, row.bound, tol, Source::riccati));
    row.fd_error_estimate = fd_err[i];
    if (row.fd) {
      TolerancePolicy fd_tol = tol;
      fd_tol.psd_slack += 2.0 * fd_err[i];
      row.verdicts.push_back(verdict(*row.fd, row.bound, fd_tol, Source::finite_difference));
    }
    if (row.jacobi) row.verdicts.push_back(verdict(*row.jacobi, row.bound, tol, Source::jacobi));
    std::vector<const CMatrix*> mats{&row.riccati.mixed.matrix()};
    if (row.fd) mats.push_back(&row.fd->mixed.matrix());
    if (row.jacobi) mats.push_back(&row.jacobi->mixed.matrix());
    for (std::size_t a = 0; a < mats.size(); ++a)
      for (std::size_t b = a + 1; b < mats.size(); ++b)
        res.oracle_spread = std::max(res.oracle_spread, relative_deviation(*mats[a], *mats[b]));
    for (const auto& v : row.verdicts) res.all_hold = res.all_hold && v.holds;
    res.rows.push_back(std::move(row));
  }
  if (rows < cfg.t_grid.size()) res.all_hold = false;
  return res;
}

EqualityReport equality_probe(const SweepConfig& cfg, double tol) {
  const SweepResult sw = run_sweep(cfg);
  const ChartPtr chart = model::build_chart(cfg.space);
  const int n = chart->complex_dim();
  const RadialSetup setup = setup_for(cfg, chart);
  const double K = chart->space_form_K().value_or(cfg.K_bound);

  EqualityReport rep;
  std::vector<double> md(static_cast<std::size_t>(n), K);
  md[0] = 2.0 * K;
  const CMatrix mixed_expected = HermitianMatrix::diagonal(md).matrix();
  CMatrix holo_slice_expected = CMatrix::Zero(n, n);
  holo_slice_expected(0, 0) = 2.0 * K;
  for (const auto& row : sw.rows) {
    const auto& v = row.verdicts.front();
    rep.max_abs_gap = std::max({rep.max_abs_gap, std::abs(v.gap_min_eigenvalue),
                                std::abs(v.gap_max_eigenvalue)});
    CMatrix holo_expected = CMatrix::Zero(n, n);
    holo_expected(0, 0) = -(row.bound.fgh.F + 0.5 * row.bound.fgh.G);
    rep.max_holo_deviation =
        std::max(rep.max_holo_deviation, max_abs(row.riccati.holo.matrix() - holo_expected));
    const int p = cfg.spec.p();
    if (p > 0) {
      rep.max_tangent_holo = std::max(
          rep.max_tangent_holo, max_abs(row.riccati.holo.matrix().bottomRightCorner(p, p)));
    }
    const auto st = geodesy::state_at(setup.path, setup.frame, row.t);
    const auto cs = model::curvature_slice_in_frame(*chart, st.z, st.frame, 1e-8);
    rep.max_slice_mixed_deviation =
        std::max(rep.max_slice_mixed_deviation, max_abs(cs.mixed.matrix() - mixed_expected));
    rep.max_slice_holo_deviation =
        std::max(rep.max_slice_holo_deviation, max_abs(cs.holo.matrix() - holo_slice_expected));
  }
  rep.equality = sw.rows.size() == cfg.t_grid.size() && rep.max_abs_gap < tol &&
                 rep.max_holo_deviation < tol && rep.max_tangent_holo < tol &&
                 rep.max_slice_mixed_deviation < tol && rep.max_slice_holo_deviation < tol;
  return rep;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  const int n = result.rows.empty() ? 0 : result.rows.front().riccati.mixed.dim();
  os << "t,F,G,H";
  for (int i = 0; i < n; ++i) os << ",riccati_b" << i;
  os << ",gap_min,gap_max\n" << std::setprecision(17);
  for (const auto& row : result.rows) {
    os << row.t << "," << row.bound.fgh.F << "," << row.bound.fgh.G << "," << row.bound.fgh.H;
    for (int i = 0; i < n; ++i) os << "," << row.riccati.mixed(i, i).real();
    os << "," << row.verdicts.front().gap_min_eigenvalue << ","
       << row.verdicts.front().gap_max_eigenvalue << "\n";
  }
}

nlohmann::json to_json(const SweepResult& result) {
  nlohmann::json verdicts = nlohmann::json::array();
  const std::string space = result.config.space.label;
  const int n = result.rows.empty() ? 0 : result.rows.front().riccati.mixed.dim();
  nlohmann::json fd_errors = nlohmann::json::array();
  for (const auto& row : result.rows) {
    if (row.fd) fd_errors.push_back({{"t", row.t}, {"estimate", row.fd_error_estimate}});
    for (const auto& v : row.verdicts) {
      verdicts.push_back({{"space", space},
                          {"K_bound", result.config.K_bound},
                          {"n", n},
                          {"p", result.config.spec.p()},
                          {"t", v.t},
                          {"source", to_string(v.computed_source)},
                          {"gap_min_eigenvalue", v.gap_min_eigenvalue},
                          {"gap_max_eigenvalue", v.gap_max_eigenvalue},
                          {"holds", v.holds}});
    }
  }
  return {{"verdicts", verdicts},
          {"evolution_status", result.evolution_status},
          {"warnings", result.warnings},
          {"max_constraint_residual", result.max_constraint_residual},
          {"oracle_spread", result.oracle_spread},
          {"psd_slack", result.psd_slack},
          {"fd_error_estimates", fd_errors},
          {"all_hold", result.all_hold}};
}

nlohmann::json to_json(const EqualityReport& r) {
  return {{"max_abs_gap", r.max_abs_gap},
          {"max_holo_deviation", r.max_holo_deviation},
          {"max_tangent_holo", r.max_tangent_holo},
          {"max_slice_mixed_deviation", r.max_slice_mixed_deviation},
          {"max_slice_holo_deviation", r.max_slice_holo_deviation},
          {"equality", r.equality}};
}

}  // namespace kahler::hessian
