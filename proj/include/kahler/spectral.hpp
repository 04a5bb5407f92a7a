#pragma once

#include <array>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kahler/modelspace.hpp"

namespace kahler::spectral {

// Eigenvalues use the complex-Laplacian convention Δ = ½ Δ_Riemannian unless
// a field says otherwise.

/// Δr for the distance to a linear CP^s in CP^n with holomorphic sectional
/// curvature 2K: F·(n - s) + G/2 + H·s.
struct RadialProfile {
  int n = 1;
  int s = 0;
  double K = 1.0;

  double delta_r(double r) const;
};

struct SpectralResult {
  std::string method;  // shooting | mesh | closed_form
  int n = 0;
  int s = 0;
  double r0 = 0.0;
  double lambda = 0.0;
  double lambda_riemannian = 0.0;
  double residual = 0.0;
  /// max |u - v| against the normalized candidate v at the critical radius;
  /// negative when r0 is not critical.
  double closed_form_deviation = -1.0;
  std::vector<std::pair<double, double>> samples;  // (r, u) for shooting
};

/// Radius with cos(√2 r0) = (2s + 1 - n)/(n + 1) (K = 1).
double critical_radius(int n, int s);

/// cos(√2 r) + (n - 2s - 1)/(n + 1): solves the radial equation with λ = n + 1.
double candidate_eigenfunction(int n, int s, double r);

/// Smallest λ whose regular radial solution of ½u'' + Δr·u' + λu = 0 first
/// vanishes at r0 (K = 1), by bisection on "first zero <= r0". The residual is
/// the sampled ‖Δu + λu‖/‖u‖ with Δu from central differences.
SpectralResult radial_dirichlet_lambda1(int n, int s, double r0, double shooting_tol = 1e-10);

// ---------------------------------------------------------------------------
// Triangle meshes of the K = 1 model CP^1 (round sphere of radius 1/√2)

struct Mesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
};

/// Subdivided icosahedron with 10·4^level + 2 vertices on the sphere of
/// the given radius.
Mesh icosphere(int level, double radius);

void write_off(std::ostream& os, const Mesh& mesh);

struct MeshEigen {
  int level = 0;
  int vertices = 0;
  std::vector<double> riemannian;  // ascending, first `count`
  double lambda1_complex = 0.0;
  double lambda0 = 0.0;            // constant mode
  int iterations = 0;
};

/// Lowest `count` eigenvalues of the cotangent Laplacian with lumped mass,
/// by shift-invert subspace iteration on L + M.
MeshEigen mesh_eigenvalues(const Mesh& mesh, int count = 9, int level = -1);

struct MeshStudy {
  std::vector<MeshEigen> levels;  // coarse to fine, last three levels
  SpectralResult finest;
  double richardson = 0.0;       // complex λ_1, h² extrapolation of the two finest
  double observed_rate = 0.0;    // log2 of successive error-difference ratio
  double cluster_ratio = 0.0;    // second cluster / first cluster
};

/// Finest level is the smallest with at least `min_vertices` vertices
/// (min_vertices >= 1000).
MeshStudy mesh_lambda1_cp1(int min_vertices = 10000);

// ---------------------------------------------------------------------------
// Chart identities on CP^1 (K = 1)

using ChartFunction = std::function<double(const model::Point&)>;

/// (1 - |z|²)/(1 + |z|²): a first eigenfunction, λ = 2.
double u_first(const model::Point& z);
/// (3 u_first² - 1)/2: second eigenspace, λ = 6.
double u_second(const model::Point& z);

struct BochnerCheck {
  double lhs = 0.0;  // λ ∫ |∂u|²
  double rhs = 0.0;  // ∫ |u_{αβ}|² + ∫ Ric(∂u, ∂̄u)
  double residual = 0.0;
  double eigen_residual = 0.0;  // max |Δu + λu| / max |u| on the nodes
};

/// Both sides by Gauss–Legendre quadrature in the geodesic radius and the
/// trapezoid rule in angle; derivatives by scaled central differences.
BochnerCheck bochner_identity_check(const ChartFunction& u, double lambda, int radial_nodes = 48,
                                    int angular_nodes = 48);

/// Derivative invariants of u at z, taken in whichever of the charts z, 1/z
/// has the smaller coordinate (the inversion is an isometry of CP^1).
struct LocalJet {
  double u = 0.0;
  double grad2 = 0.0;   // |∂u|²
  double hess2 = 0.0;   // |u_{αβ}|²
  double lap = 0.0;     // Δu
  double ric = 0.0;     // Ric(∂u, ∂̄u)
};

LocalJet local_jet(const ChartFunction& u, const model::Point& z);

struct EqualityCaseReport {
  double uab_norm = 0.0;       // sup |u_{αβ}| (covariant, metric norm)
  double phi_variation = 0.0;  // sup |φ - mean φ|, φ = Δu + 2u
};

EqualityCaseReport equality_case_checks(const ChartFunction& u, int radial_nodes = 24,
                                        int angular_nodes = 24);

nlohmann::json to_json(const SpectralResult& r);
nlohmann::json to_json(const MeshStudy& s);
nlohmann::json to_json(const BochnerCheck& b);
nlohmann::json to_json(const EqualityCaseReport& e);

}  // namespace kahler::spectral
