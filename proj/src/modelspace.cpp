#include "kahler/modelspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace kahler::model {

double Tensor3::max_abs() const {
  double v = 0.0;
  for (const auto& c : data_) v = std::max(v, std::abs(c));
  return v;
}

double Tensor4::max_abs() const {
  double v = 0.0;
  for (const auto& c : data_) v = std::max(v, std::abs(c));
  return v;
}

std::string to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::flat: return "flat";
    case SpaceKind::fubini_study: return "fubini_study";
    case SpaceKind::complex_hyperbolic: return "complex_hyperbolic";
    case SpaceKind::product: return "product";
    case SpaceKind::potential: return "potential";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Space forms

SpaceFormChart::SpaceFormChart(int n, double K) : n_(n), K_(K) {
  if (n <= 0) throw std::invalid_argument("SpaceFormChart: dimension must be positive");
  if (!std::isfinite(K)) throw std::invalid_argument("SpaceFormChart: K must be finite");
}

SpaceKind SpaceFormChart::kind() const {
  if (K_ > 0.0) return SpaceKind::fubini_study;
  if (K_ < 0.0) return SpaceKind::complex_hyperbolic;
  return SpaceKind::flat;
}

std::string SpaceFormChart::label() const {
  std::ostringstream os;
  os << to_string(kind()) << "(n=" << n_ << ",K=" << K_ << ")";
  return os.str();
}

bool SpaceFormChart::in_domain(const Point& z) const {
  if (z.size() != n_) return false;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z(i).real()) || !std::isfinite(z(i).imag())) return false;
  }
  const double r2 = z.squaredNorm();
  if (r2 > kChartRadiusLimit * kChartRadiusLimit) return false;
  return 1.0 + K_ * r2 > 1e-12;
}

double SpaceFormChart::potential(const Point& z) const {
  const double r2 = z.squaredNorm();
  if (K_ == 0.0) return r2;
  return std::log1p(K_ * r2) / K_;
}

CMatrix SpaceFormChart::metric_raw(const Point& z) const {
  const double w = 1.0 + K_ * z.squaredNorm();
  CMatrix g = CMatrix::Identity(n_, n_) / w;
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b) g(a, b) -= K_ * std::conj(z(a)) * z(b) / (w * w);
  return g;
}

MetricJet SpaceFormChart::jet(const Point& z) const {
  const double K = K_;
  const double w = 1.0 + K * z.squaredNorm();
  const double w2 = w * w, w3 = w2 * w, w4 = w3 * w;
  auto delta = [](int i, int j) { return i == j ? 1.0 : 0.0; };
  MetricJet out;
  out.g = metric_raw(z);
  out.d1 = Tensor3(n_);
  out.d2 = Tensor4(n_);
  for (int c = 0; c < n_; ++c) {
    const cplx zc_bar = std::conj(z(c));
    for (int a = 0; a < n_; ++a) {
      const cplx za_bar = std::conj(z(a));
      for (int b = 0; b < n_; ++b) {
        const cplx zb = z(b);
        out.d1(c, a, b) = -K * delta(a, b) * zc_bar / w2 - K * za_bar * delta(b, c) / w2 +
                          2.0 * K * K * za_bar * zb * zc_bar / w3;
        for (int d = 0; d < n_; ++d) {
          const cplx zd = z(d);
          cplx v = -K * delta(a, b) * (delta(c, d) / w2 - 2.0 * K * zc_bar * zd / w3);
          v += -K * delta(b, c) * (delta(a, d) / w2 - 2.0 * K * za_bar * zd / w3);
          v += 2.0 * K * K *
               ((delta(a, d) * zb * zc_bar + za_bar * zb * delta(c, d)) / w3 -
                3.0 * K * za_bar * zb * zc_bar * zd / w4);
          out.d2(c, d, a, b) = v;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Products

ProductChart::ProductChart(std::vector<ChartPtr> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("ProductChart: no factors");
  for (const auto& f : factors_) {
    if (!f) throw std::invalid_argument("ProductChart: null factor");
    offsets_.push_back(n_);
    n_ += f->complex_dim();
  }
}

std::string ProductChart::label() const {
  std::string s = "product(";
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) s += " x ";
    s += factors_[i]->label();
  }
  return s + ")";
}

bool ProductChart::in_domain(const Point& z) const {
  if (z.size() != n_) return false;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (!factors_[i]->in_domain(z.segment(offsets_[i], factors_[i]->complex_dim()))) return false;
  }
  return true;
}

double ProductChart::potential(const Point& z) const {
  double v = 0.0;
  for (std::size_t i = 0; i < factors_.size(); ++i)
    v += factors_[i]->potential(z.segment(offsets_[i], factors_[i]->complex_dim()));
  return v;
}

CMatrix ProductChart::metric_raw(const Point& z) const {
  CMatrix g = CMatrix::Zero(n_, n_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const int m = factors_[i]->complex_dim();
    g.block(offsets_[i], offsets_[i], m, m) = factors_[i]->metric_raw(z.segment(offsets_[i], m));
  }
  return g;
}

MetricJet ProductChart::jet(const Point& z) const {
  MetricJet out;
  out.g = CMatrix::Zero(n_, n_);
  out.d1 = Tensor3(n_);
  out.d2 = Tensor4(n_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const int m = factors_[i]->complex_dim();
    const int o = offsets_[i];
    const MetricJet fj = factors_[i]->jet(z.segment(o, m));
    out.g.block(o, o, m, m) = fj.g;
    for (int c = 0; c < m; ++c)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          out.d1(o + c, o + a, o + b) = fj.d1(c, a, b);
          for (int d = 0; d < m; ++d) out.d2(o + c, o + d, o + a, o + b) = fj.d2(c, d, a, b);
        }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite-difference potentials

PotentialChart::PotentialChart(int n, Potential potential, Domain domain, double h,
                               std::string label)
    : n_(n), potential_(std::move(potential)), domain_(std::move(domain)), h_(h),
      label_(std::move(label)) {
  if (n <= 0) throw std::invalid_argument("PotentialChart: dimension must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("PotentialChart: step must be positive");
}

namespace {

// Shift along real coordinate k: k < n moves Re z_k, k >= n moves Im z_{k-n}.
Point shifted(const Point& z, int k, double s) {
  Point out = z;
  const auto n = static_cast<int>(z.size());
  if (k < n) out(k) += cplx(s, 0.0);
  else out(k - n) += cplx(0.0, s);
  return out;
}

// Real Hessian (2n x 2n) of a scalar or matrix valued function by central
// differences. F returns a type supporting +, -, and scalar division.
template <typename F>
auto real_hessian(const F& f, const Point& z, double h) {
  using T = decltype(f(z));
  const int m = 2 * static_cast<int>(z.size());
  std::vector<T> H(static_cast<std::size_t>(m * m));
  const T f0 = f(z);
  for (int k = 0; k < m; ++k) {
    const T fp = f(shifted(z, k, h));
    const T fm = f(shifted(z, k, -h));
    H[static_cast<std::size_t>(k * m + k)] = (fp - 2.0 * f0 + fm) / (h * h);
    for (int l = k + 1; l < m; ++l) {
      const T fpp = f(shifted(shifted(z, k, h), l, h));
      const T fpm = f(shifted(shifted(z, k, h), l, -h));
      const T fmp = f(shifted(shifted(z, k, -h), l, h));
      const T fmm = f(shifted(shifted(z, k, -h), l, -h));
      const T v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      H[static_cast<std::size_t>(k * m + l)] = v;
      H[static_cast<std::size_t>(l * m + k)] = v;
    }
  }
  return H;
}

}  // namespace

CMatrix PotentialChart::metric_raw(const Point& z) const {
  const auto H = real_hessian([this](const Point& p) { return potential_(p); }, z, h_);
  const int m = 2 * n_;
  auto at = [&](int k, int l) { return H[static_cast<std::size_t>(k * m + l)]; };
  CMatrix g(n_, n_);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      g(a, b) = 0.25 * cplx(at(a, b) + at(n_ + a, n_ + b), at(a, n_ + b) - at(n_ + a, b));
  return g;
}

MetricJet PotentialChart::jet(const Point& z) const {
  MetricJet out;
  out.g = metric_raw(z);
  out.d1 = Tensor3(n_);
  out.d2 = Tensor4(n_);
  const int m = 2 * n_;
  auto metric = [this](const Point& p) { return metric_raw(p); };
  for (int c = 0; c < n_; ++c) {
    const CMatrix dx = (metric(shifted(z, c, h_)) - metric(shifted(z, c, -h_))) / (2.0 * h_);
    const CMatrix dy =
        (metric(shifted(z, n_ + c, h_)) - metric(shifted(z, n_ + c, -h_))) / (2.0 * h_);
    const CMatrix dz = 0.5 * (dx - cplx(0.0, 1.0) * dy);
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) out.d1(c, a, b) = dz(a, b);
  }
  const auto H = real_hessian(metric, z, h_);
  auto at = [&](int k, int l) -> const CMatrix& { return H[static_cast<std::size_t>(k * m + l)]; };
  const cplx I(0.0, 1.0);
  for (int c = 0; c < n_; ++c)
    for (int d = 0; d < n_; ++d) {
      const CMatrix v =
          0.25 * (at(c, d) + at(n_ + c, n_ + d) + I * (at(c, n_ + d) - at(n_ + c, d)));
      for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) out.d2(c, d, a, b) = v(a, b);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Factories

ChartPtr make_flat(int n) { return std::make_shared<SpaceFormChart>(n, 0.0); }

ChartPtr make_fubini_study(int n, double K) {
  if (!(K > 0.0)) throw std::invalid_argument("fubini_study: K must be positive");
  return std::make_shared<SpaceFormChart>(n, K);
}

ChartPtr make_complex_hyperbolic(int n, double K) {
  if (!(K < 0.0)) throw std::invalid_argument("complex_hyperbolic: K must be negative");
  return std::make_shared<SpaceFormChart>(n, K);
}

ChartPtr make_space_form(int n, double K) { return std::make_shared<SpaceFormChart>(n, K); }

ChartPtr make_product(std::vector<ChartPtr> factors) {
  return std::make_shared<ProductChart>(std::move(factors));
}

ChartPtr make_fd_chart(const ChartPtr& base, double h) {
  ChartPtr keep = base;
  return std::make_shared<PotentialChart>(
      base->complex_dim(), [keep](const Point& z) { return keep->potential(z); },
      [keep](const Point& z) { return keep->in_domain(z); }, h, "fd:" + base->label());
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

void require_domain(const KahlerChart& chart, const Point& z, const char* what) {
  if (z.size() != chart.complex_dim()) {
    throw std::invalid_argument(std::string(what) + ": point has wrong dimension");
  }
  if (!chart.in_domain(z)) {
    throw std::invalid_argument(std::string(what) + ": point outside chart domain");
  }
}

void require_positive(const CMatrix& g, const char* what) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || !(es.eigenvalues()(0) > 0.0)) {
    throw NumericalError(std::string(what) + ": metric is not positive definite");
  }
}

// g^{p q̄} as a matrix W with W g^T = I.
CMatrix inverse_metric(const CMatrix& g) { return g.transpose().inverse(); }

}  // namespace

HermitianMatrix metric_at(const KahlerChart& chart, const Point& z) {
  require_domain(chart, z, "metric_at");
  const CMatrix g = chart.metric_raw(z);
  require_positive(g, "metric_at");
  return HermitianMatrix(g, 1e-6);
}

Tensor3 christoffel_at(const KahlerChart& chart, const Point& z) {
  require_domain(chart, z, "christoffel_at");
  const MetricJet j = chart.jet(z);
  require_positive(j.g, "christoffel_at");
  const CMatrix W = inverse_metric(j.g);
  const int n = chart.complex_dim();
  Tensor3 gamma(n);
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        cplx s = 0.0;
        for (int d = 0; d < n; ++d) s += W(c, d) * j.d1(a, b, d);
        gamma(c, a, b) = s;
      }
  return gamma;
}

Tensor4 curvature_tensor(const KahlerChart& chart, const Point& z) {
  require_domain(chart, z, "curvature_tensor");
  const MetricJet j = chart.jet(z);
  require_positive(j.g, "curvature_tensor");
  const CMatrix W = inverse_metric(j.g);
  const int n = chart.complex_dim();
  Tensor4 R(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          cplx s = -j.d2(c, d, a, b);
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) s += W(p, q) * j.d1(c, a, q) * std::conj(j.d1(d, b, p));
          R(a, b, c, d) = s;
        }
  return R;
}

double norm2(const CMatrix& g, const CVector& X) {
  return (X.transpose() * g * X.conjugate())(0, 0).real();
}

cplx inner(const CMatrix& g, const CVector& X, const CVector& Y) {
  return (X.transpose() * g * Y.conjugate())(0, 0);
}

namespace {

cplx contract(const Tensor4& R, const CVector& X, const CVector& Y) {
  const int n = R.dim();
  cplx s = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          s += R(a, b, c, d) * X(a) * std::conj(X(b)) * Y(c) * std::conj(Y(d));
  return s;
}

double quotient(const Tensor4& R, const CMatrix& g, const CVector& X, const CVector& Y) {
  const double den = norm2(g, X) * norm2(g, Y) + std::norm(inner(g, X, Y));
  return contract(R, X, Y).real() / den;
}

}  // namespace

cplx curvature_at(const KahlerChart& chart, const Point& z, const CVector& X, const CVector& Y) {
  if (X.size() != chart.complex_dim() || Y.size() != chart.complex_dim()) {
    throw std::invalid_argument("curvature_at: tangent vectors have wrong dimension");
  }
  return contract(curvature_tensor(chart, z), X, Y);
}

double bisectional_quotient(const KahlerChart& chart, const Point& z, const CVector& X,
                            const CVector& Y) {
  if (X.norm() == 0.0 || Y.norm() == 0.0) {
    throw std::invalid_argument("bisectional_quotient: X and Y must be nonzero");
  }
  return quotient(curvature_tensor(chart, z), chart.metric_raw(z), X, Y);
}

BisectionalEstimate bisectional_lower_bound_estimate(const KahlerChart& chart,
                                                     const std::vector<Point>& sample_points,
                                                     int samples_per_point, std::uint64_t rng_seed,
                                                     Exec exec) {
  if (sample_points.empty()) {
    throw std::invalid_argument("bisectional_lower_bound_estimate: no sample points");
  }
  if (samples_per_point < 0) {
    throw std::invalid_argument("bisectional_lower_bound_estimate: negative sample count");
  }
  for (const auto& z : sample_points) require_domain(chart, z, "bisectional_lower_bound_estimate");

  const int n = chart.complex_dim();
  const auto count = static_cast<long>(sample_points.size());
  std::vector<BisectionalEstimate> per_point(sample_points.size());

  auto work = [&](long i) {
    const Point& z = sample_points[static_cast<std::size_t>(i)];
    const Tensor4 R = curvature_tensor(chart, z);
    const CMatrix g = chart.metric_raw(z);
    BisectionalEstimate best;
    best.min_ratio = std::numeric_limits<double>::infinity();
    auto consider = [&](const CVector& X, const CVector& Y) {
      const double q = quotient(R, g, X, Y);
      ++best.evaluated;
      if (q < best.min_ratio) {
        best.min_ratio = q;
        best.argmin_z = z;
        best.argmin_X = X;
        best.argmin_Y = Y;
      }
    };
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) consider(CVector::Unit(n, a), CVector::Unit(n, b));
    std::mt19937_64 rng(stream_seed(rng_seed, static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int s = 0; s < samples_per_point; ++s) {
      CVector X(n), Y(n);
      for (int a = 0; a < n; ++a) X(a) = cplx(normal(rng), normal(rng));
      for (int a = 0; a < n; ++a) Y(a) = cplx(normal(rng), normal(rng));
      consider(X, Y);
    }
    per_point[static_cast<std::size_t>(i)] = std::move(best);
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) work(i);
  } else {
    for (long i = 0; i < count; ++i) work(i);
  }

  BisectionalEstimate out = per_point.front();
  out.evaluated = 0;
  for (const auto& p : per_point) {
    out.evaluated += p.evaluated;
    if (p.min_ratio < out.min_ratio) {
      const auto ev = out.evaluated;
      out = p;
      out.evaluated = ev;
    }
  }
  return out;
}

std::vector<Point> sample_points(const KahlerChart& chart, int count, double radius,
                                 std::uint64_t rng_seed) {
  if (count <= 0) throw std::invalid_argument("sample_points: count must be positive");
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  const int n = chart.complex_dim();
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  int guard = 0;
  while (static_cast<int>(out.size()) < count) {
    Point z(n);
    for (int a = 0; a < n; ++a) z(a) = cplx(u(rng), u(rng));
    if (chart.in_domain(z)) out.push_back(z);
    if (++guard > 1000 * count) throw NumericalError("sample_points: domain too small for radius");
  }
  return out;
}

double unitarity_defect(const CMatrix& g, const CMatrix& frame) {
  const CMatrix gram = frame.transpose() * g * frame.conjugate();
  return max_abs(gram - CMatrix::Identity(frame.cols(), frame.cols()));
}

Tensor4 frame_curvature(const KahlerChart& chart, const Point& z, const CMatrix& frame) {
  const Tensor4 R = curvature_tensor(chart, z);
  const int n = chart.complex_dim();
  const CMatrix& E = frame;
  // Contract one slot at a time: slots 0 and 2 with E, slots 1 and 3 with Ē.
  auto contract_slot = [n](const Tensor4& T, const CMatrix& M, int slot) {
    Tensor4 out(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            cplx s = 0.0;
            for (int p = 0; p < n; ++p) {
              switch (slot) {
                case 0: s += T(p, j, k, l) * M(p, i); break;
                case 1: s += T(i, p, k, l) * M(p, j); break;
                case 2: s += T(i, j, p, l) * M(p, k); break;
                default: s += T(i, j, k, p) * M(p, l); break;
              }
            }
            out(i, j, k, l) = s;
          }
    return out;
  };
  const CMatrix Ebar = E.conjugate();
  Tensor4 t = contract_slot(R, E, 0);
  t = contract_slot(t, Ebar, 1);
  t = contract_slot(t, E, 2);
  t = contract_slot(t, Ebar, 3);
  return t;
}

CurvatureSlice curvature_slice_in_frame(const KahlerChart& chart, const Point& z,
                                        const CMatrix& frame, double unitary_tol) {
  require_domain(chart, z, "curvature_slice_in_frame");
  const int n = chart.complex_dim();
  if (frame.rows() != n || frame.cols() != n) {
    throw std::invalid_argument("curvature_slice_in_frame: frame must be n x n");
  }
  const double defect = unitarity_defect(chart.metric_raw(z), frame);
  if (defect > unitary_tol) {
    throw std::invalid_argument("curvature_slice_in_frame: frame not unitary (defect " +
                                std::to_string(defect) + ")");
  }
  const Tensor4 Rf = frame_curvature(chart, z, frame);
  CMatrix mixed(n, n), holo(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      mixed(a, b) = Rf(a, b, 0, 0);
      holo(a, b) = Rf(a, 0, b, 0);
    }
  return {HermitianMatrix(mixed, 1e-8), SymmetricComplexMatrix(holo, 1e-8)};
}

}  // namespace kahler::model
