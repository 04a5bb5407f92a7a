#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kahler/exec.hpp"
#include "kahler/modelspace.hpp"

namespace kahler::volume {

// Volumes use the measure 2^n det(g_{ab̄}) dLebesgue on C^n = R^{2n}, the
// Riemannian volume of the metric whose distance is distance_fs.

/// Ric_{ab̄} = g^{cd̄} R_{ab̄cd̄}.
CMatrix ricci_at(const model::KahlerChart& chart, const model::Point& z);

/// Complex scalar curvature g^{ab̄} Ric_{ab̄}; n(n+1)K on a space form.
double scalar_curvature_at(const model::KahlerChart& chart, const model::Point& z);

/// The λ with 2π c₁ = sign·λ[ω] for a Kähler–Einstein metric, λ = |R|/n.
struct ChernFactor {
  double lambda = 0.0;
  int sign = 1;           // +1 when c₁ > 0, -1 when c₁ < 0
  double scalar = 0.0;    // R used
  bool constant = true;   // false when R varied over the sample points
  std::string note;
};

/// Pure algebra, no chart: λ = |R|/n with the sign of R. R = 0 is rejected.
ChernFactor chern_factor_from_scalar(double scalar, int n);

/// R from the curvature trace at the origin and at `samples` seeded points;
/// a non-constant R is replaced by the sample mean and noted.
ChernFactor chern_factor(const model::KahlerChart& chart, int samples = 16,
                         std::uint64_t seed = 1);

/// (2π(n+1))^n / (n! λ^n): the volume of CP^n with Ric = λ ω.
double formula_volume(int n, double lambda);

/// Volume of CP^n with Ric = ω, n = 1..3: 4π, 18π², 512π³/6.
double base_volume(int n);

/// V_k(CP^n): the model with constant scalar curvature k > 0, by scaling the
/// pinned base volume.
double model_volume_for_scalar(int n, double k);

struct QuadratureOptions {
  int radial_order = 64;    // Gauss–Legendre order per complex coordinate
  int angular_nodes = 8;    // trapezoid nodes per complex coordinate
  Exec exec = Exec::parallel;
};

/// Product rule in polar coordinates per complex coordinate. Fubini–Study
/// coordinates use ρ = tan(φ)/√K over the whole chart; flat coordinates use
/// the unit disk. Accepts space-form charts with K >= 0 and products of them;
/// anything else throws invalid_argument. The result does not depend on exec.
double volume_quadrature(const model::KahlerChart& chart, const QuadratureOptions& opts = {});

struct ScalingReport {
  int n = 0;
  std::vector<double> lambdas;
  std::vector<double> formula;
  std::vector<double> quadrature;     // empty when not requested
  double formula_spread = 0.0;        // max relative deviation of V·λ^n
  double quadrature_spread = 0.0;
  double mixed_deviation = 0.0;       // max |V_quad/V_formula - 1|
};

ScalingReport scaling_law_check(int n, const std::vector<double>& lambdas, bool with_quadrature,
                                const QuadratureOptions& opts = {});

/// Two-sided band V_{k2} <= V <= V_{k1}.
struct BandVerdict {
  int n = 0;
  double k1 = 0.0, k2 = 0.0;
  double V = 0.0;
  double V_k1 = 0.0, V_k2 = 0.0;
  bool lower_holds = false;   // V_{k2} <= V
  bool upper_holds = false;   // V <= V_{k1}
  bool lower_equal = false;
  bool upper_equal = false;
  bool holds = false;
  std::string message;
};

/// Requires 0 < k1 <= k2 and n in 1..3. Equality is detected at 1e-6
/// relative.
BandVerdict comparison_verdict(int n, double k1, double k2, double V);

struct VolumeReport {
  int n = 0;
  double V_quadrature = 0.0;
  double V_formula = 0.0;
  double relative_error = 0.0;
  ChernFactor chern;
  BandVerdict band;
};

/// Quadrature and formula volumes of a Fubini–Study chart and its band
/// verdict against scalar curvatures [k1, k2]. The verdict uses the formula
/// volume; the quadrature volume is its independent check.
VolumeReport volume_report(const model::KahlerChart& chart, double k1, double k2,
                           const QuadratureOptions& opts = {});

/// Columns k,V_k,V for k on an even grid of `points` values in [k_lo, k_hi].
void write_band_csv(std::ostream& os, int n, double k_lo, double k_hi, int points, double V);

nlohmann::json to_json(const ChernFactor& c);
nlohmann::json to_json(const ScalingReport& s);
nlohmann::json to_json(const BandVerdict& b);
nlohmann::json to_json(const VolumeReport& r);

}  // namespace kahler::volume
