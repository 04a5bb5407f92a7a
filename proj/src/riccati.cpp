#include "kahler/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace kahler::riccati {

namespace {

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

CMatrix rhs(const CMatrix& X, const CMatrix& R) { return R - X * X; }

bool blown(const CMatrix& X, double limit) { return !X.allFinite() || max_abs(X) > limit; }

}  // namespace

HermitianCurve integrate_riccati(const CurvatureCurve& R, const HermitianMatrix& seed, double t0,
                                 double T, const std::vector<double>& output_times,
                                 const IntegrationOptions& opts) {
  if (!(t0 > 0.0) || !(T > t0)) throw std::invalid_argument("integrate_riccati: need 0 < t0 < T");
  if (!(opts.step > 0.0) || !(opts.grade > 0.0)) {
    throw std::invalid_argument("integrate_riccati: step and grade must be positive");
  }
  if (!std::is_sorted(output_times.begin(), output_times.end()) ||
      (!output_times.empty() && (output_times.front() <= t0 || output_times.back() > T))) {
    throw std::invalid_argument("integrate_riccati: output times must be sorted in (t0, T]");
  }
  HermitianCurve curve;
  curve.n = seed.dim();
  curve.T = T;
  curve.singular_at_zero = t0 * max_abs(seed.matrix()) > 0.1;
  CMatrix X = seed.matrix();
  double t = t0;
  for (double target : output_times) {
    while (t < target) {
      double h = std::min({opts.step, opts.grade * t, target - t});
      if (target - (t + h) < 1e-14) h = target - t;
      const double tn = (target - (t + h) < 1e-14) ? target : t + h;
      const CMatrix Rm = R(t + 0.5 * h);
      const CMatrix k1 = rhs(X, R(t));
      const CMatrix k2 = rhs(X + 0.5 * h * k1, Rm);
      const CMatrix k3 = rhs(X + 0.5 * h * k2, Rm);
      const CMatrix k4 = rhs(X + h * k3, R(tn));
      X = hermitian_part(X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
      t = tn;
      if (blown(X, opts.blow_up)) {
        curve.status = "blow_up";
        return curve;
      }
    }
    curve.t.push_back(target);
    curve.values.emplace_back(X);
  }
  return curve;
}

bool singular_limit_settles(const HermitianCurve& curve, double tol) {
  if (curve.t.size() < 3) return false;
  // Successive differences of t·X(t) along the first samples shrink.
  double prev = -1.0;
  for (std::size_t k = 0; k + 1 < std::min<std::size_t>(curve.t.size(), 6); ++k) {
    const double d = max_abs(curve.t[k + 1] * curve.values[k + 1].matrix() -
                             curve.t[k] * curve.values[k].matrix());
    if (prev >= 0.0 && d > prev + tol) return false;
    prev = d;
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {

CMatrix gaussian_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(nd(rng), nd(rng));
  return m;
}

CMatrix random_hermitian(int n, std::mt19937_64& rng) {
  return hermitian_part(gaussian_matrix(n, rng)) / std::sqrt(2.0 * n);
}

// exp(i H) for Hermitian H.
CMatrix unitary_exp(const CMatrix& H) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  const CVector ph = es.eigenvalues().unaryExpr([](double l) { return std::polar(1.0, l); });
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

RiccatiInstance random_instance(int n, std::uint64_t seed, std::uint64_t index) {
  if (n < 1) throw std::invalid_argument("random_instance: n must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const CMatrix H0 = random_hermitian(n, rng), H1 = random_hermitian(n, rng),
                H2 = random_hermitian(n, rng);
  RVector omega(n), phase(n);
  for (int k = 0; k < n; ++k) {
    omega(k) = 0.5 + 2.5 * ud(rng);
    phase(k) = 2.0 * std::numbers::pi * ud(rng);
  }
  const CMatrix M0 = 0.5 * gaussian_matrix(n, rng) / std::sqrt(2.0 * n);
  const CMatrix M1 = 0.5 * gaussian_matrix(n, rng) / std::sqrt(2.0 * n);

  RiccatiInstance inst;
  inst.n = n;
  inst.index = index;
  inst.R_A = [=](double t) {
    const CMatrix Q = unitary_exp(H0 + t * H1 + t * t * H2);
    RVector lam(n);
    for (int k = 0; k < n; ++k) lam(k) = std::sin(omega(k) * t + phase(k));
    return hermitian_part(Q * lam.cast<cplx>().asDiagonal() * Q.adjoint());
  };
  const CurvatureCurve RA = inst.R_A;
  inst.R_B = [=](double t) {
    const CMatrix M = M0 + t * M1;
    return hermitian_part(RA(t) + M * M.adjoint());
  };

  Eigen::HouseholderQR<CMatrix> qr(gaussian_matrix(n, rng));
  const CMatrix U = qr.householderQ();
  RVector bits(n);
  for (int k = 0; k < n; ++k) bits(k) = (k == 0 || ud(rng) < 0.5) ? 1.0 : 0.0;
  const CMatrix P = hermitian_part(U * bits.cast<cplx>().asDiagonal() * U.adjoint());
  CMatrix S = random_hermitian(n, rng);
  const auto ev = hermitian_eigenvalues(HermitianMatrix(S));
  const double norm = std::max(std::abs(ev.front()), std::abs(ev.back()));
  if (norm > 0.0) S *= 0.3 * ud(rng) / norm;
  inst.seed = HermitianMatrix(hermitian_part(P / inst.t0 + S));
  return inst;
}

ComparisonResult comparison_check(const RiccatiInstance& inst, const TolerancePolicy& tol,
                                  const IntegrationOptions& opts, int samples) {
  if (samples < 1) throw std::invalid_argument("comparison_check: samples must be positive");
  std::vector<double> grid;
  for (int k = 1; k <= samples; ++k) grid.push_back(inst.t0 + (inst.T - inst.t0) * k / samples);

  ComparisonResult res;
  res.hypothesis_margin = std::numeric_limits<double>::infinity();
  std::vector<double> hgrid{inst.t0};
  hgrid.insert(hgrid.end(), grid.begin(), grid.end());
  for (double t : hgrid) {
    const double m =
        hermitian_eigenvalues(HermitianMatrix(inst.R_B(t)) - HermitianMatrix(inst.R_A(t))).front();
    res.hypothesis_margin = std::min(res.hypothesis_margin, m);
  }
  if (res.hypothesis_margin < -tol.psd_slack) {
    res.hypothesis_ok = false;
    res.status = "hypothesis_violation";
    return res;
  }
  const HermitianCurve A = integrate_riccati(inst.R_A, inst.seed, inst.t0, inst.T, grid, opts);
  const HermitianCurve B = integrate_riccati(inst.R_B, inst.seed, inst.t0, inst.T, grid, opts);
  if (A.status != "complete" || B.status != "complete") res.status = "truncated";
  const std::size_t common = std::min(A.values.size(), B.values.size());
  res.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < common; ++k) {
    const double m = hermitian_eigenvalues(B.values[k] - A.values[k]).front();
    if (m < res.worst_margin) {
      res.worst_margin = m;
      res.worst_t = A.t[k];
    }
  }
  if (common == 0) res.worst_margin = 0.0;
  res.holds = res.worst_margin >= -tol.psd_slack;
  return res;
}

SuiteSummary run_suite(int instances, int max_dim, std::uint64_t suite_seed,
                       const TolerancePolicy& tol, const IntegrationOptions& opts, Exec exec) {
  if (instances < 1 || max_dim < 1) {
    throw std::invalid_argument("run_suite: instances and max_dim must be positive");
  }
  std::vector<ComparisonResult> results(static_cast<std::size_t>(instances));
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
  for (int i = 0; i < instances; ++i) {
    const std::uint64_t s = stream_seed(suite_seed, static_cast<std::uint64_t>(i));
    const int n = 1 + static_cast<int>(s % static_cast<std::uint64_t>(max_dim));
    results[static_cast<std::size_t>(i)] =
        comparison_check(random_instance(n, s, static_cast<std::uint64_t>(i)), tol, opts);
  }
  SuiteSummary sum;
  sum.instances = instances;
  sum.psd_slack = tol.psd_slack;
  sum.suite_seed = suite_seed;
  sum.max_dim = max_dim;
  sum.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < instances; ++i) {
    const auto& r = results[static_cast<std::size_t>(i)];
    if (!r.hypothesis_ok) {
      ++sum.hypothesis_violations;
      continue;
    }
    if (r.status == "truncated") ++sum.truncated;
    if (!r.holds) ++sum.failures;
    if (r.worst_margin < sum.worst_margin) {
      sum.worst_margin = r.worst_margin;
      sum.worst_instance = static_cast<std::uint64_t>(i);
    }
  }
  return sum;
}

nlohmann::json to_json(const SuiteSummary& s) {
  return {{"instances", s.instances},
          {"failures", s.failures},
          {"hypothesis_violations", s.hypothesis_violations},
          {"truncated", s.truncated},
          {"worst_margin", s.worst_margin},
          {"worst_instance", s.worst_instance},
          {"psd_slack", s.psd_slack},
          {"suite_seed", s.suite_seed},
          {"max_dim", s.max_dim}};
}

ScalarCheck scalar_checks(double k, double t0, const IntegrationOptions& opts) {
  if (!(k > 0.0)) throw std::invalid_argument("scalar_checks: k must be positive");
  const double sk = std::sqrt(k);
  const double T = std::min(1.0, 0.9 * std::numbers::pi / sk);
  std::vector<double> grid;
  for (int i = 1; i <= 100; ++i) grid.push_back(t0 + (T - t0) * i / 100.0);
  const HermitianMatrix seed = HermitianMatrix::identity(2) * (1.0 / t0);
  auto constant = [](double c) { return [c](double) { return CMatrix(c * CMatrix::Identity(2, 2)); }; };
  auto worst = [&](const HermitianCurve& c, const std::function<double(double)>& exact) {
    double e = 0.0;
    for (std::size_t i = 0; i < c.t.size(); ++i) {
      const double x = exact(c.t[i]);
      e = std::max(e, max_abs(c.values[i].matrix() - x * CMatrix::Identity(2, 2)) /
                          std::max(1.0, std::abs(x)));
    }
    if (c.t.size() != grid.size()) e = std::numeric_limits<double>::infinity();
    return e;
  };
  ScalarCheck sc;
  const auto zero = integrate_riccati(constant(0.0), seed, t0, T, grid, opts);
  const auto pos = integrate_riccati(constant(k), seed, t0, T, grid, opts);
  const auto neg = integrate_riccati(constant(-k), seed, t0, T, grid, opts);
  sc.max_error_zero = worst(zero, [](double t) { return 1.0 / t; });
  sc.max_error_positive = worst(pos, [&](double t) { return sk / std::tanh(sk * t); });
  sc.max_error_negative = worst(neg, [&](double t) { return sk / std::tan(sk * t); });
  if (k == 1.0) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double t = grid[i];
      const double m = hermitian_eigenvalues(pos.values[i] - zero.values[i]).front();
      sc.max_margin_error = std::max(sc.max_margin_error, std::abs(m - (1.0 / std::tanh(t) - 1.0 / t)));
    }
  }
  return sc;
}

CongruenceCheck congruence_reduction_check(const hessian::RadialSetup& setup, double K_bound,
                                           const std::vector<double>& t_grid,
                                           const hessian::EvolveOptions& opts, double slack,
                                           double delta) {
  std::vector<double> times;
  for (double t : t_grid) {
    times.push_back(t - delta);
    times.push_back(t);
    times.push_back(t + delta);
  }
  const auto ev = hessian::evolve_hessian(setup, times, opts);
  if (ev.pairs.size() != times.size()) throw NumericalError("congruence check: evolution truncated");
  const int n = setup.chart->complex_dim();
  std::vector<double> d(static_cast<std::size_t>(n), 1.0);
  d[0] = std::sqrt(2.0);
  std::vector<double> rhs(static_cast<std::size_t>(n), -0.5 * K_bound);
  rhs[0] = -2.0 * K_bound;
  const CMatrix R = HermitianMatrix::diagonal(rhs).matrix();
  CongruenceCheck out;
  out.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const CMatrix Bm = congruence(d, ev.pairs[3 * i].mixed).matrix();
    const CMatrix B0 = congruence(d, ev.pairs[3 * i + 1].mixed).matrix();
    const CMatrix Bp = congruence(d, ev.pairs[3 * i + 2].mixed).matrix();
    const CMatrix lhs = (Bp - Bm) / (2.0 * delta) + B0 * B0;
    const HermitianMatrix diff(hermitian_part(lhs - R), 1e-6);
    out.max_violation = std::max(out.max_violation, hermitian_eigenvalues(diff).back());
    out.max_abs_deviation = std::max(out.max_abs_deviation, max_abs(lhs - R));
  }
  out.holds = out.max_violation <= slack;
  return out;
}

}  // namespace kahler::riccati
