#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kahler/exec.hpp"
#include "kahler/hessian.hpp"
#include "kahler/hermitian.hpp"

namespace kahler::riccati {

/// t ↦ R(t), Hermitian-valued.
using CurvatureCurve = std::function<CMatrix(double)>;

/// Solution samples of X' = R - X².
struct HermitianCurve {
  int n = 0;
  double T = 0.0;
  bool singular_at_zero = false;
  std::vector<double> t;
  std::vector<HermitianMatrix> values;
  std::string status = "complete";  // complete | blow_up
};

struct IntegrationOptions {
  double step = 1e-3;
  double grade = 1.0 / 32.0;  // steps capped at grade·t near the start
  double blow_up = 1e8;
};

/// RK4 on X' = R - X² from X(t0) = seed, Hermitian-symmetrized per step,
/// sampled at `output_times` (each in (t0, T]).
HermitianCurve integrate_riccati(const CurvatureCurve& R, const HermitianMatrix& seed, double t0,
                                 double T, const std::vector<double>& output_times,
                                 const IntegrationOptions& opts = {});

/// Checks t·X(t) settles on a dyadic grid toward t0 (used for singular seeds).
bool singular_limit_settles(const HermitianCurve& curve, double tol);

struct RiccatiInstance {
  int n = 1;
  double t0 = 1e-4;
  double T = 1.0;
  CurvatureCurve R_A;
  CurvatureCurve R_B;
  HermitianMatrix seed;  // common value at t0
  std::uint64_t index = 0;
};

/// Random instance with R_A = Q Λ Q* (Q = exp of a skew-Hermitian quadratic
/// in t, Λ in [-1, 1]), R_B = R_A + M M* (M affine in t) and seed
/// (1/t0) P + S with P a random orthogonal projection and ‖S‖ ≤ 0.3.
RiccatiInstance random_instance(int n, std::uint64_t seed, std::uint64_t index = 0);

struct ComparisonResult {
  bool hypothesis_ok = true;
  double hypothesis_margin = 0.0;  // min λ_min(R_B - R_A) on the grid
  bool holds = true;               // only meaningful when hypothesis_ok
  double worst_margin = 0.0;       // min λ_min(B - A) on the common domain
  double worst_t = 0.0;
  std::string status = "complete";  // complete | hypothesis_violation | truncated
};

/// Integrates A from R_A and B from R_B with the common seed and checks
/// A ≤ B on a uniform grid of `samples` points in (t0, T].
ComparisonResult comparison_check(const RiccatiInstance& inst, const TolerancePolicy& tol,
                                  const IntegrationOptions& opts = {}, int samples = 100);

struct SuiteSummary {
  int instances = 0;
  int failures = 0;
  int hypothesis_violations = 0;
  int truncated = 0;
  double worst_margin = 0.0;
  std::uint64_t worst_instance = 0;
  double psd_slack = 0.0;
  std::uint64_t suite_seed = 0;
  int max_dim = 0;
};

/// Instance i uses dimension 1 + (stream_seed(seed, i) mod max_dim) and its
/// own rng stream; the summary is independent of `exec`.
SuiteSummary run_suite(int instances, int max_dim, std::uint64_t suite_seed,
                       const TolerancePolicy& tol, const IntegrationOptions& opts = {},
                       Exec exec = Exec::parallel);

nlohmann::json to_json(const SuiteSummary& s);

struct ScalarCheck {
  double max_error_zero = 0.0;     // R = 0:   1/t
  double max_error_positive = 0.0; // R = +k:  √k coth(√k t)
  double max_error_negative = 0.0; // R = -k:  √k cot(√k t) on (0, π/√k)
  double max_margin_error = 0.0;   // comparison margin vs coth t - 1/t
};

/// Scalar closed-form reductions with a singular seed at t0.
ScalarCheck scalar_checks(double k = 1.0, double t0 = 1e-4, const IntegrationOptions& opts = {});

struct CongruenceCheck {
  double max_violation = 0.0;  // max eigenvalue of B̃' + B̃² - diag(-2K, -(K/2) I)
  double max_abs_deviation = 0.0;
  bool holds = false;
};

/// With B̃ = D B D, D = diag(√2, I), verifies B̃' + B̃² ≤ diag(-2K, -(K/2)I)
/// + slack along a Hessian evolution, B̃' by central differences of width δ.
CongruenceCheck congruence_reduction_check(const hessian::RadialSetup& setup, double K_bound,
                                           const std::vector<double>& t_grid,
                                           const hessian::EvolveOptions& opts, double slack,
                                           double delta = 1e-5);

}  // namespace kahler::riccati
