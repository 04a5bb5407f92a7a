#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kahler/exec.hpp"
#include "kahler/hermitian.hpp"

namespace kahler::model {

/// A point of a holomorphic chart (dimensionless coordinates in C^n).
using Point = CVector;

/// Dense rank-3 complex array, index order (i, j, k), row-major in k.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), cplx(0.0, 0.0)) {}
  int dim() const { return n_; }
  cplx& operator()(int i, int j, int k) { return data_[idx(i, j, k)]; }
  cplx operator()(int i, int j, int k) const { return data_[idx(i, j, k)]; }
  double max_abs() const;

 private:
  std::size_t idx(int i, int j, int k) const {
    return static_cast<std::size_t>((i * n_ + j) * n_ + k);
  }
  int n_ = 0;
  std::vector<cplx> data_;
};

/// Dense rank-4 complex array, index order (i, j, k, l).
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n)
      : n_(n), data_(static_cast<std::size_t>(n * n * n * n), cplx(0.0, 0.0)) {}
  int dim() const { return n_; }
  cplx& operator()(int i, int j, int k, int l) { return data_[idx(i, j, k, l)]; }
  cplx operator()(int i, int j, int k, int l) const { return data_[idx(i, j, k, l)]; }
  double max_abs() const;

 private:
  std::size_t idx(int i, int j, int k, int l) const {
    return static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l);
  }
  int n_ = 0;
  std::vector<cplx> data_;
};

/// First and mixed second derivatives of the metric at a point.
///
///   d1(c, a, b)    = d/dz_c g_{a b̄}
///   d2(c, d, a, b) = d/dz_c d/dz̄_d g_{a b̄}
struct MetricJet {
  CMatrix g;
  Tensor3 d1;
  Tensor4 d2;
};

enum class SpaceKind { flat, fubini_study, complex_hyperbolic, product, potential };

std::string to_string(SpaceKind k);

/// A Kähler metric on one holomorphic chart, g_{ab̄} = ∂_a ∂_b̄ potential.
///
/// Implementations are immutable. `jet()` is the only geometric primitive;
/// Christoffel symbols and curvature are assembled from it generically.
class KahlerChart {
 public:
  virtual ~KahlerChart() = default;

  virtual int complex_dim() const = 0;
  virtual SpaceKind kind() const = 0;
  virtual std::string label() const = 0;
  virtual bool in_domain(const Point& z) const = 0;
  virtual double potential(const Point& z) const = 0;
  virtual CMatrix metric_raw(const Point& z) const = 0;
  virtual MetricJet jet(const Point& z) const = 0;

  /// Constant K when the chart is a space form of holomorphic sectional
  /// curvature 2K; empty otherwise.
  virtual std::optional<double> space_form_K() const { return std::nullopt; }
};

using ChartPtr = std::shared_ptr<const KahlerChart>;

/// Potential (1/K) log(1 + K|z|^2) for K != 0, |z|^2 for K = 0, on the
/// domain {1 + K|z|^2 > 0}. Metric, first and second metric derivatives are
/// closed-form.
class SpaceFormChart final : public KahlerChart {
 public:
  SpaceFormChart(int n, double K);

  int complex_dim() const override { return n_; }
  SpaceKind kind() const override;
  std::string label() const override;
  bool in_domain(const Point& z) const override;
  double potential(const Point& z) const override;
  CMatrix metric_raw(const Point& z) const override;
  MetricJet jet(const Point& z) const override;
  std::optional<double> space_form_K() const override { return K_; }

  double K() const { return K_; }

  /// Points with |z| above this are treated as having left the chart.
  static constexpr double kChartRadiusLimit = 1e7;

 private:
  int n_;
  double K_;
};

/// Block-diagonal product of charts.
class ProductChart final : public KahlerChart {
 public:
  explicit ProductChart(std::vector<ChartPtr> factors);

  int complex_dim() const override { return n_; }
  SpaceKind kind() const override { return SpaceKind::product; }
  std::string label() const override;
  bool in_domain(const Point& z) const override;
  double potential(const Point& z) const override;
  CMatrix metric_raw(const Point& z) const override;
  MetricJet jet(const Point& z) const override;

  const std::vector<ChartPtr>& factors() const { return factors_; }
  /// Starting coordinate index of factor i.
  int offset(std::size_t i) const { return offsets_[i]; }

 private:
  std::vector<ChartPtr> factors_;
  std::vector<int> offsets_;
  int n_ = 0;
};

/// Arbitrary potential; all derivatives by nested central differences with
/// step h (error O(h^2)).
class PotentialChart final : public KahlerChart {
 public:
  using Potential = std::function<double(const Point&)>;
  using Domain = std::function<bool(const Point&)>;

  PotentialChart(int n, Potential potential, Domain domain, double h = 1e-4,
                 std::string label = "potential");

  int complex_dim() const override { return n_; }
  SpaceKind kind() const override { return SpaceKind::potential; }
  std::string label() const override { return label_; }
  bool in_domain(const Point& z) const override { return domain_(z); }
  double potential(const Point& z) const override { return potential_(z); }
  CMatrix metric_raw(const Point& z) const override;
  MetricJet jet(const Point& z) const override;

  double step() const { return h_; }

 private:
  int n_;
  Potential potential_;
  Domain domain_;
  double h_;
  std::string label_;
};

ChartPtr make_flat(int n);
ChartPtr make_fubini_study(int n, double K);
ChartPtr make_complex_hyperbolic(int n, double K);
ChartPtr make_space_form(int n, double K);
ChartPtr make_product(std::vector<ChartPtr> factors);
/// Finite-difference chart driven by another chart's potential.
ChartPtr make_fd_chart(const ChartPtr& base, double h);

/// Positive-definite Hermitian metric g_{ab̄}(z).
HermitianMatrix metric_at(const KahlerChart& chart, const Point& z);

/// Γ^c_{ab} = g^{c d̄} ∂_a g_{b d̄}, stored as gamma(c, a, b).
Tensor3 christoffel_at(const KahlerChart& chart, const Point& z);

/// R_{a b̄ c d̄} in chart coordinates, stored as R(a, b, c, d).
///
/// Sign convention: R_{ab̄cd̄} = -∂_c∂_d̄ g_{ab̄} + g^{pq̄} ∂_c g_{aq̄} ∂_d̄ g_{pb̄},
/// under which a space form satisfies R = K(g_{ab̄}g_{cd̄} + g_{ad̄}g_{cb̄}).
Tensor4 curvature_tensor(const KahlerChart& chart, const Point& z);

/// R(X, X̄, Y, Ȳ) for (1,0)-vectors X, Y given by chart components.
cplx curvature_at(const KahlerChart& chart, const Point& z, const CVector& X, const CVector& Y);

/// ‖X‖² = g(X, X̄).
double norm2(const CMatrix& g, const CVector& X);
/// ⟨X, Ȳ⟩ = g(X, Ȳ).
cplx inner(const CMatrix& g, const CVector& X, const CVector& Y);

/// The bisectional quotient R(X,X̄,Y,Ȳ) / (‖X‖²‖Y‖² + |⟨X,Ȳ⟩|²).
double bisectional_quotient(const KahlerChart& chart, const Point& z, const CVector& X,
                            const CVector& Y);

struct BisectionalEstimate {
  double min_ratio = 0.0;
  Point argmin_z;
  CVector argmin_X;
  CVector argmin_Y;
  std::size_t evaluated = 0;
};

/// Minimum of the bisectional quotient over the sample points. At every point
/// the candidate pairs are all pairs of coordinate axes plus
/// `samples_per_point` Gaussian random pairs; point i draws from its own
/// stream seeded by (rng_seed, i), so the result does not depend on `exec`.
BisectionalEstimate bisectional_lower_bound_estimate(const KahlerChart& chart,
                                                     const std::vector<Point>& sample_points,
                                                     int samples_per_point, std::uint64_t rng_seed,
                                                     Exec exec = Exec::parallel);

/// `count` random points of the chart with |z_i| <= radius per coordinate,
/// rejected until in-domain.
std::vector<Point> sample_points(const KahlerChart& chart, int count, double radius,
                                 std::uint64_t rng_seed);

/// Curvature components in a unitary frame (columns of `frame` are e_1..e_n
/// in chart coordinates):
///   mixed(a, b) = R(e_a, ē_b, e_1, ē_1),  holo(a, b) = R(e_a, ē_1, e_b, ē_1).
struct CurvatureSlice {
  HermitianMatrix mixed;
  SymmetricComplexMatrix holo;
};

/// max |E^T g Ē - I|.
double unitarity_defect(const CMatrix& g, const CMatrix& frame);

CurvatureSlice curvature_slice_in_frame(const KahlerChart& chart, const Point& z,
                                        const CMatrix& frame, double unitary_tol = 1e-10);

/// R(e_a, ē_b, e_c, ē_d) for all frame indices.
Tensor4 frame_curvature(const KahlerChart& chart, const Point& z, const CMatrix& frame);

}  // namespace kahler::model
