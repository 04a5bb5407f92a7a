#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kahler/chart_config.hpp"
#include "kahler/geodesy.hpp"

namespace kahler::hessian {

using model::ChartPtr;
using model::Point;

// ---------------------------------------------------------------------------
// Comparison functions

struct BoundFunctions {
  double F = 0.0;
  double G = 0.0;
  double H = 0.0;
};

/// F_K, G_K, H_K at distance r. With x² = (K/2) r² (signed):
///   F = (1/r)·x cot x,   G = -√(2K)/sin(√(2K) r),   H = -(1/r)·x tan x,
/// which reproduce the cot/coth/1-over-r displays in each sign regime.
/// Small arguments switch to truncated series so the K -> 0 limit is smooth.
BoundFunctions bound_functions(double K, double r);

// ---------------------------------------------------------------------------
// Submanifolds and Hessian pairs

enum class SubKind { point, linear_subvariety };

/// A point, or the linear subvariety {z_j = 0 for j not in tangent_axes}
/// of the chart (complex dimension p = tangent_axes.size()).
struct SubmanifoldSpec {
  SubKind kind = SubKind::point;
  std::vector<int> tangent_axes;

  int p() const { return static_cast<int>(tangent_axes.size()); }
  static SubmanifoldSpec point() { return {}; }
  static SubmanifoldSpec subvariety(std::vector<int> axes) {
    return {SubKind::linear_subvariety, std::move(axes)};
  }
};

std::string describe(const SubmanifoldSpec& spec);

/// (r_{αβ̄}, r_{αβ}) in the frame (radial e_1, normal block, S-tangent block).
struct HessianPair {
  double t = 0.0;
  HermitianMatrix mixed;
  SymmetricComplexMatrix holo;
};

/// max_α |r_{α1} + r_{α1̄}|.
double first_column_residual(const HessianPair& pair);

/// Leading singular data: mixed = diag(1/(2ε), (1/ε) I_{n-p-1}, 0_p),
/// holo = diag(-1/(2ε), 0_{n-1}).
HessianPair riccati_seed(int n, const SubmanifoldSpec& spec, double eps);

// ---------------------------------------------------------------------------
// Geodesic set-up

/// Unit-speed geodesic leaving S orthogonally with its adapted parallel frame.
struct RadialSetup {
  ChartPtr chart;
  SubmanifoldSpec spec;
  geodesy::GeodesicPath path;
  geodesy::ParallelFrame frame;
};

/// `direction` is rescaled to unit speed. For subvarieties the footpoint must
/// lie on S and the direction must be g-orthogonal to it (checked to 1e-10).
RadialSetup radial_setup(const ChartPtr& chart, const SubmanifoldSpec& spec,
                         const Point& footpoint, const CVector& direction, double t_max,
                         double step);

// ---------------------------------------------------------------------------
// Riccati evolution

struct EvolveOptions {
  double eps = 1e-3;
  double step = 1e-3;
  /// Steps near the singular start are capped at grade·t.
  double grade = 1.0 / 32.0;
  /// Add the O(t) term of the singular solution to the seed (see README).
  bool first_order_seed = true;
  /// Multiplies both curvature slices; 1 is the geometric flow.
  double curvature_scale = 1.0;
  /// Repeat at step/2 and step/4 and report the observed order.
  bool check_order = false;
  double pole_threshold = 1e8;
};

struct HessianEvolution {
  std::vector<HessianPair> pairs;  // one per requested output time (fewer if truncated)
  std::string status = "complete";  // complete | pole
  double max_constraint_residual = 0.0;
  std::optional<double> observed_order;
  std::vector<std::string> warnings;
};

/// Integrates
///   B' + B² + C C̄ = -½ R_mixed,   C' + C Bᵀ + B C = ½ R_holo
/// (B = r_{αβ̄}, C = r_{αβ}) from t = eps with RK4, curvature slices taken in
/// the parallel frame of `setup`. Output times must exceed eps and lie on the
/// integrated path.
HessianEvolution evolve_hessian(const RadialSetup& setup, const std::vector<double>& output_times,
                                const EvolveOptions& opts = {});

// ---------------------------------------------------------------------------
// Bounds and verdicts

struct BoundMatrices {
  double t = 0.0;
  BoundFunctions fgh;
  HermitianMatrix bound_mixed;
};

/// F(I - P_S) + G r r* + H P_S with r = (1/√2, 0, ..., 0).
BoundMatrices bound_at(double K, double t, int n, const SubmanifoldSpec& spec);

enum class Source { riccati, finite_difference, jacobi, closed_form };
std::string to_string(Source s);

struct ComparisonVerdict {
  double t = 0.0;
  Source computed_source = Source::riccati;
  double gap_min_eigenvalue = 0.0;
  double gap_max_eigenvalue = 0.0;
  bool holds = false;
};

/// Loewner check bound_mixed - computed.mixed >= -psd_slack.
ComparisonVerdict verdict(const HessianPair& computed, const BoundMatrices& bound,
                          const TolerancePolicy& tol, Source source = Source::riccati);

/// psd_slack used for verdicts at integration step h: 1e-5 + 10 h².
double verdict_slack(double step);

// ---------------------------------------------------------------------------
// Independent oracles

/// Distance from S as a function on the chart.
using DistanceField = std::function<double(const Point&)>;

/// Closed-form distance to S for space forms (point or coordinate subvariety
/// through the origin) and for products (point case); distance_oracle
/// shooting for any other chart (point case only).
DistanceField distance_field(const ChartPtr& chart, const SubmanifoldSpec& spec,
                             const Point& footpoint);

/// Central differences of r at step h in real coordinates, converted to
/// Wirtinger derivatives, Christoffel-corrected for the holomorphic part and
/// expressed in `frame`.
HessianPair fd_hessian_oracle(const model::KahlerChart& chart, const DistanceField& r,
                              const Point& z, const CMatrix& frame, double h, double t = 0.0);

struct JacobiOptions {
  double step = 1e-3;
  double max_condition = 1e10;
};

struct JacobiResult {
  std::vector<HessianPair> pairs;
  std::string status = "complete";  // complete | conjugate_point
};

/// Shape operator from the complex Jacobi system
///   x''_α = ½(R_{1γ̄1ᾱ} x̄_γ - R_{βᾱ11̄} x_β)
/// for a basis of S-Jacobi fields orthogonal to the radial direction.
JacobiResult jacobi_oracle(const RadialSetup& setup, const std::vector<double>& output_times,
                           const JacobiOptions& opts = {});

// ---------------------------------------------------------------------------
// Sweeps and equality probes

struct SweepConfig {
  model::ChartSpec space;
  double K_bound = 0.0;
  SubmanifoldSpec spec;
  std::vector<double> t_grid;
  double eps = 1e-3;
  double step = 1e-3;
  bool with_fd = true;
  bool with_jacobi = true;
  double fd_h = 1e-4;
  Exec exec = Exec::parallel;
};

struct SweepRow {
  double t = 0.0;
  BoundMatrices bound;
  HessianPair riccati;
  std::optional<HessianPair> fd;
  std::optional<HessianPair> jacobi;
  double fd_error_estimate = 0.0;  // |H(h) - H(2h)|/3; widens the FD verdict slack by twice this
  std::vector<ComparisonVerdict> verdicts;  // one per available source
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;
  std::string evolution_status;
  std::vector<std::string> warnings;
  double max_constraint_residual = 0.0;
  /// max over rows of ‖A - B‖_max / max(1, ‖A‖_max) over source pairs.
  double oracle_spread = 0.0;
  double psd_slack = 0.0;
  bool all_hold = true;
};

/// Footpoint at the chart origin; the geodesic leaves along the first
/// coordinate axis not tangent to S.
SweepResult run_sweep(const SweepConfig& cfg);

/// Relative deviation ‖A - B‖_max / max(1, ‖A‖_max).
double relative_deviation(const CMatrix& a, const CMatrix& b);

struct EqualityReport {
  double max_abs_gap = 0.0;           // max |eigenvalue| of bound - computed
  double max_holo_deviation = 0.0;    // vs diag(-(F + G/2), 0)
  double max_tangent_holo = 0.0;      // |r_{αβ}| on the S-tangent block
  double max_slice_mixed_deviation = 0.0;  // vs diag(2K, K I)
  double max_slice_holo_deviation = 0.0;   // vs 2K E_11
  bool equality = false;
};

/// Runs the model sweep and compares against the equality-case closed forms.
/// `equality` is true when every deviation is below `tol`.
EqualityReport equality_probe(const SweepConfig& cfg, double tol = 1e-5);

/// Curves for plotting: t, F, G, H, computed diagonal (riccati), gap eigenvalues.
void write_sweep_csv(std::ostream& os, const SweepResult& result);
nlohmann::json to_json(const SweepResult& result);
nlohmann::json to_json(const EqualityReport& report);

}  // namespace kahler::hessian
