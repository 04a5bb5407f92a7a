#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kahler/modelspace.hpp"

namespace kahler::geodesy {

using model::ChartPtr;
using model::Point;

// Tangent vectors are carried by their (1,0)-components v = dz/dt. The real
// vector is v^a ∂_a + conj(v^a) ∂_ā and its Riemannian length squared is
// 2 g(v, v̄), so ‖∂/∂x_a‖² = 2 g_{aā} and flat distance is √2 |Δz|.

/// Riemannian length squared of the real tangent vector with (1,0)-part v.
double riemannian_norm2(const CMatrix& g, const CVector& v);

/// Rescales v to unit Riemannian length at z.
CVector unit_tangent(const model::KahlerChart& chart, const Point& z, const CVector& v);

enum class PathStatus { complete, left_chart, hit_radius };
std::string to_string(PathStatus s);

struct PathSample {
  double t = 0.0;
  Point z;
  CVector velocity;  // (1,0)-part of σ'
};

/// Arclength-parametrized geodesic sampled at a fixed step.
struct GeodesicPath {
  ChartPtr chart;
  std::vector<PathSample> samples;
  double step = 0.0;
  PathStatus status = PathStatus::complete;
  double max_renormalization = 0.0;  // max |scale - 1| applied to keep unit speed

  double t_end() const { return samples.empty() ? 0.0 : samples.back().t; }
};

/// Classical RK4 on z'' + Γ(z', z') = 0 with fixed step, renormalizing to unit
/// speed after every step. Stops with `left_chart` if a stage leaves the chart
/// domain and with `hit_radius` once |z| exceeds `max_chart_radius`.
GeodesicPath integrate_geodesic(const ChartPtr& chart, const Point& z0, const CVector& v0,
                                double t_max, double step,
                                std::optional<double> max_chart_radius = std::nullopt);

/// Unitary frames e_1..e_n (matrix columns, chart components) parallel along
/// a path, with e_1 = √2 v = (σ' - iJσ')/√2.
struct ParallelFrame {
  std::vector<CMatrix> frames;
  double max_correction = 0.0;        // Gram–Schmidt correction per step
  double max_unitarity_defect = 0.0;  // after correction

  const CMatrix& at(std::size_t k) const { return frames.at(k); }
};

ParallelFrame parallel_transport_frame(const GeodesicPath& path, const CMatrix& initial_frame);

/// A unitary frame at z whose first vector is √2 v, completed by Gram–Schmidt
/// on `completion` columns (coordinate axes if empty).
CMatrix adapted_frame(const model::KahlerChart& chart, const Point& z, const CVector& v,
                      const CMatrix& completion = CMatrix());

/// Position, velocity and frame at an arbitrary arclength, obtained by one
/// RK4 step of the joint geodesic/transport system from the preceding sample.
struct TransportState {
  double t = 0.0;
  Point z;
  CVector velocity;
  CMatrix frame;
};

TransportState state_at(const GeodesicPath& path, const ParallelFrame& frame, double t);

/// max over interior samples and frame vectors of ‖∇_t e_a‖ (Hermitian norm),
/// with d/dt by a five-point stencil.
double parallelism_residual(const GeodesicPath& path, const ParallelFrame& frame);

/// max |2 g(v, v̄) - 1| over samples.
double speed_defect(const GeodesicPath& path);

/// Writes columns t, re_z<i>, im_z<i>, then re_e<a>_<i>, im_e<a>_<i> (frame
/// vector a, chart component i) when a frame is given.
void write_path_csv(std::ostream& os, const GeodesicPath& path,
                    const ParallelFrame* frame = nullptr);

// ---------------------------------------------------------------------------
// Complex projective space in homogeneous coordinates

/// Fubini–Study distance with holomorphic sectional curvature 2K:
/// (√2/√K)·arccos(|⟨z,w⟩|/(‖z‖‖w‖)), evaluated through atan2 for accuracy at
/// both ends.
double distance_fs(int n, double K, const CVector& z, const CVector& w);

struct SubspaceDistances {
  double r_P = 0.0;
  double r_Q = 0.0;
};

/// Distances from [ξ] ∈ CP^n to P = span(e_0..e_s) and Q = span(e_{s+1}..e_n).
SubspaceDistances distance_to_subspace(int n, double K, int s, const CVector& xi);

/// Distance from [ξ] to the projective subspace spanned by the coordinate
/// axes with `in_subspace[i]` true.
double distance_to_coordinate_subspace(double K, const CVector& xi,
                                       const std::vector<bool>& in_subspace);

/// Homogeneous coordinates (1, √K z) of a chart point of the K > 0 space form.
CVector chart_to_homogeneous(double K, const Point& z);
/// Inverse of chart_to_homogeneous; requires xi_0 != 0.
Point homogeneous_to_chart(double K, const CVector& xi);

// ---------------------------------------------------------------------------
// Shooting

struct ShootingOptions {
  int steps = 1000;
  double tol = 1e-9;
  int max_iterations = 60;
};

struct ShootingResult {
  double distance = 0.0;
  double miss = 0.0;
  int iterations = 0;
  CVector initial_velocity;  // for the parameter interval [0, 1]
};

/// Arclength of the geodesic joining two chart points, found by Gauss–Newton
/// shooting on the initial velocity (SVD pseudo-inverse, so conjugate
/// endpoints are tolerated). Throws NumericalError with the best miss if the
/// endpoint is not reached to `tol`.
ShootingResult distance_oracle(const model::KahlerChart& chart, const Point& z_from,
                               const Point& z_to, const ShootingOptions& opts = {});

/// Fubini–Study distance by shooting in a unitarily recentred chart whose
/// origin is the midpoint of the two points.
ShootingResult fs_distance_by_shooting(int n, double K, const CVector& xi, const CVector& omega,
                                       const ShootingOptions& opts = {});

}  // namespace kahler::geodesy
