#include "kahler/volume.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kahler/quadrature.hpp"

namespace kahler::volume {

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Polar nodes for one complex coordinate: z = ρ e^{iθ}, weight includes the
// Jacobian ρ dρ dθ.
struct PolarNode {
  cplx z;
  double w;
};

std::vector<PolarNode> polar_nodes(double K, const QuadratureOptions& opts) {
  std::vector<PolarNode> out;
  const bool flat = K == 0.0;
  const GaussRule g = gauss_legendre(opts.radial_order, 0.0, flat ? 1.0 : kPi / 2.0);
  const double dtheta = 2.0 * kPi / opts.angular_nodes;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    double rho = g.x[i], jac = 1.0;
    if (!flat) {
      const double c = std::cos(g.x[i]);
      rho = std::tan(g.x[i]) / std::sqrt(K);
      jac = 1.0 / (c * c * std::sqrt(K));
    }
    for (int k = 0; k < opts.angular_nodes; ++k) {
      // half-offset angles keep ρ = 0 symmetric under the trapezoid rule
      const double th = (k + 0.5) * dtheta;
      out.push_back({std::polar(rho, th), g.w[i] * jac * rho * dtheta});
    }
  }
  return out;
}

double space_form_K_checked(const model::KahlerChart& c) {
  const auto* sf = dynamic_cast<const model::SpaceFormChart*>(&c);
  if (sf == nullptr) throw std::invalid_argument("volume_quadrature: factor is not a space form");
  if (sf->K() < 0.0)
    throw std::invalid_argument("volume_quadrature: complex hyperbolic chart has infinite volume");
  return sf->K();
}

std::vector<double> coordinate_curvatures(const model::KahlerChart& chart) {
  std::vector<double> Ks;
  if (const auto* pc = dynamic_cast<const model::ProductChart*>(&chart)) {
    for (const auto& f : pc->factors()) {
      const double K = space_form_K_checked(*f);
      for (int i = 0; i < f->complex_dim(); ++i) Ks.push_back(K);
    }
  } else {
    const double K = space_form_K_checked(chart);
    for (int i = 0; i < chart.complex_dim(); ++i) Ks.push_back(K);
  }
  return Ks;
}

}  // namespace

CMatrix ricci_at(const model::KahlerChart& chart, const model::Point& z) {
  const int n = chart.complex_dim();
  const model::Tensor4 R = model::curvature_tensor(chart, z);
  const CMatrix W = model::metric_at(chart, z).matrix().transpose().inverse();
  CMatrix ric = CMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) ric(a, b) += W(c, d) * R(a, b, c, d);
  return ric;
}

double scalar_curvature_at(const model::KahlerChart& chart, const model::Point& z) {
  const int n = chart.complex_dim();
  const CMatrix ric = ricci_at(chart, z);
  const CMatrix W = model::metric_at(chart, z).matrix().transpose().inverse();
  cplx s = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s += W(a, b) * ric(a, b);
  return s.real();
}

ChernFactor chern_factor_from_scalar(double scalar, int n) {
  if (n < 1) throw std::invalid_argument("chern_factor: n must be positive");
  if (!std::isfinite(scalar) || scalar == 0.0)
    throw std::invalid_argument("chern_factor: scalar curvature must be finite and nonzero");
  ChernFactor c;
  c.scalar = scalar;
  c.sign = scalar > 0.0 ? 1 : -1;
  c.lambda = std::abs(scalar) / n;
  c.note = c.sign > 0 ? "c1 > 0: lambda = +R/n" : "c1 < 0: lambda = -R/n (algebra only)";
  return c;
}

ChernFactor chern_factor(const model::KahlerChart& chart, int samples, std::uint64_t seed) {
  const int n = chart.complex_dim();
  const double R0 = scalar_curvature_at(chart, model::Point::Zero(n));
  double sum = R0, dev = 0.0;
  int count = 1;
  if (samples > 0) {
    for (const auto& z : model::sample_points(chart, samples, 1.0, seed)) {
      const double R = scalar_curvature_at(chart, z);
      sum += R;
      dev = std::max(dev, std::abs(R - R0));
      ++count;
    }
  }
  const bool constant = dev <= 1e-8 * std::max(1.0, std::abs(R0));
  ChernFactor c = chern_factor_from_scalar(constant ? R0 : sum / count, n);
  c.constant = constant;
  if (!constant) c.note += "; scalar curvature not constant, sample mean used";
  return c;
}

double formula_volume(int n, double lambda) {
  if (n < 1 || !(lambda > 0.0)) throw std::invalid_argument("formula_volume: need n >= 1, lambda > 0");
  return std::pow(2.0 * kPi * (n + 1) / lambda, n) / factorial(n);
}

double base_volume(int n) {
  switch (n) {
    case 1: return 4.0 * kPi;
    case 2: return 18.0 * kPi * kPi;
    case 3: return 512.0 * kPi * kPi * kPi / 6.0;
    default: throw std::invalid_argument("base_volume: n must be 1, 2 or 3");
  }
}

double model_volume_for_scalar(int n, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("model_volume_for_scalar: k must be positive");
  return base_volume(n) / std::pow(k / n, n);
}

double volume_quadrature(const model::KahlerChart& chart, const QuadratureOptions& opts) {
  if (opts.angular_nodes < 1) throw std::invalid_argument("volume_quadrature: angular_nodes < 1");
  const std::vector<double> Ks = coordinate_curvatures(chart);
  const int n = static_cast<int>(Ks.size());
  std::vector<std::vector<PolarNode>> nodes;
  for (double K : Ks) nodes.push_back(polar_nodes(K, opts));
  const std::size_t m = nodes[0].size();
  if (std::pow(static_cast<double>(m), n) > 5e7)
    throw std::invalid_argument("volume_quadrature: node count exceeds budget");
  const double scale = std::pow(2.0, n);

  std::vector<double> partial(m, 0.0);
  auto outer = [&](std::size_t i0) {
    model::Point z(n);
    z(0) = nodes[0][i0].z;
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    double acc = 0.0;
    while (true) {
      double w = nodes[0][i0].w;
      for (int c = 1; c < n; ++c) {
        const auto& nd = nodes[static_cast<std::size_t>(c)][idx[static_cast<std::size_t>(c)]];
        z(c) = nd.z;
        w *= nd.w;
      }
      acc += w * chart.metric_raw(z).determinant().real();
      int c = n - 1;
      for (; c >= 1; --c) {
        auto& k = idx[static_cast<std::size_t>(c)];
        if (++k < nodes[static_cast<std::size_t>(c)].size()) break;
        k = 0;
      }
      if (c < 1) break;
    }
    partial[i0] = acc;
  };
  if (opts.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) outer(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < m; ++i) outer(i);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return scale * total;
}

ScalingReport scaling_law_check(int n, const std::vector<double>& lambdas, bool with_quadrature,
                                const QuadratureOptions& opts) {
  if (lambdas.empty()) throw std::invalid_argument("scaling_law_check: empty lambda list");
  ScalingReport r;
  r.n = n;
  r.lambdas = lambdas;
  const double ref = formula_volume(n, lambdas[0]) * std::pow(lambdas[0], n);
  for (double l : lambdas) {
    const double V = formula_volume(n, l);
    r.formula.push_back(V);
    r.formula_spread = std::max(r.formula_spread, std::abs(V * std::pow(l, n) / ref - 1.0));
  }
  if (with_quadrature) {
    double qref = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const double l = lambdas[i];
      const double V = volume_quadrature(*model::make_fubini_study(n, l / (n + 1)), opts);
      r.quadrature.push_back(V);
      const double scaled = V * std::pow(l, n);
      if (i == 0) qref = scaled;
      r.quadrature_spread = std::max(r.quadrature_spread, std::abs(scaled / qref - 1.0));
      r.mixed_deviation = std::max(r.mixed_deviation, std::abs(V / r.formula[i] - 1.0));
    }
  }
  return r;
}

BandVerdict comparison_verdict(int n, double k1, double k2, double V) {
  if (!(k1 > 0.0) || !(k2 > 0.0)) throw std::invalid_argument("comparison_verdict: k1, k2 must be positive");
  if (k1 > k2) throw std::invalid_argument("comparison_verdict: k1 > k2");
  if (!(V > 0.0)) throw std::invalid_argument("comparison_verdict: V must be positive");
  BandVerdict b;
  b.n = n;
  b.k1 = k1;
  b.k2 = k2;
  b.V = V;
  b.V_k1 = model_volume_for_scalar(n, k1);
  b.V_k2 = model_volume_for_scalar(n, k2);
  constexpr double eq_tol = 1e-6;
  b.lower_equal = std::abs(V - b.V_k2) <= eq_tol * b.V_k2;
  b.upper_equal = std::abs(V - b.V_k1) <= eq_tol * b.V_k1;
  b.lower_holds = b.lower_equal || V >= b.V_k2;
  b.upper_holds = b.upper_equal || V <= b.V_k1;
  b.holds = b.lower_holds && b.upper_holds;
  if (!b.holds)
    b.message = "volume outside the band";
  else if (b.lower_equal || b.upper_equal)
    b.message = "rigidity case: holomorphically isometric to CP^" + std::to_string(n) +
                " with a Fubini-Study metric";
  else
    b.message = "strict inequalities";
  return b;
}

VolumeReport volume_report(const model::KahlerChart& chart, double k1, double k2,
                           const QuadratureOptions& opts) {
  const auto K = chart.space_form_K();
  if (!K || *K <= 0.0 || chart.kind() != model::SpaceKind::fubini_study)
    throw std::invalid_argument("volume_report: needs a Fubini-Study chart");
  VolumeReport r;
  r.n = chart.complex_dim();
  r.chern = chern_factor(chart);
  r.V_formula = formula_volume(r.n, r.chern.lambda);
  r.V_quadrature = volume_quadrature(chart, opts);
  r.relative_error = std::abs(r.V_quadrature / r.V_formula - 1.0);
  r.band = comparison_verdict(r.n, k1, k2, r.V_formula);
  return r;
}

void write_band_csv(std::ostream& os, int n, double k_lo, double k_hi, int points, double V) {
  if (points < 2 || !(k_lo > 0.0) || !(k_hi > k_lo))
    throw std::invalid_argument("write_band_csv: bad grid");
  os.precision(12);
  os << "k,V_k,V\n";
  for (int i = 0; i < points; ++i) {
    const double k = k_lo + (k_hi - k_lo) * i / (points - 1);
    os << k << "," << model_volume_for_scalar(n, k) << "," << V << "\n";
  }
}

nlohmann::json to_json(const ChernFactor& c) {
  return {{"lambda", c.lambda}, {"sign", c.sign}, {"scalar", c.scalar},
          {"constant", c.constant}, {"note", c.note}};
}

nlohmann::json to_json(const ScalingReport& s) {
  return {{"n", s.n},
          {"lambdas", s.lambdas},
          {"formula", s.formula},
          {"quadrature", s.quadrature},
          {"formula_spread", s.formula_spread},
          {"quadrature_spread", s.quadrature_spread},
          {"mixed_deviation", s.mixed_deviation}};
}

nlohmann::json to_json(const BandVerdict& b) {
  return {{"n", b.n},
          {"scalar_range", {b.k1, b.k2}},
          {"V", b.V},
          {"V_k1", b.V_k1},
          {"V_k2", b.V_k2},
          {"lower_holds", b.lower_holds},
          {"upper_holds", b.upper_holds},
          {"lower_equal", b.lower_equal},
          {"upper_equal", b.upper_equal},
          {"holds", b.holds},
          {"message", b.message}};
}

nlohmann::json to_json(const VolumeReport& r) {
  return {{"n", r.n},
          {"V_quadrature", r.V_quadrature},
          {"V_formula", r.V_formula},
          {"relative_error", r.relative_error},
          {"chern_factor", to_json(r.chern)},
          {"band", to_json(r.band)}};
}

}  // namespace kahler::volume
