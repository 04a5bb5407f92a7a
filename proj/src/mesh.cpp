#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "kahler/spectral.hpp"

namespace kahler::spectral {

Mesh icosphere(int level, double radius) {
  if (level < 0 || level > 8) throw std::invalid_argument("icosphere: level must be in 0..8");
  if (!(radius > 0.0)) throw std::invalid_argument("icosphere: radius must be positive");
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  Mesh m;
  m.vertices = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
                {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (auto& v : m.vertices) v.normalize();
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      m.vertices.push_back((m.vertices[static_cast<std::size_t>(a)] +
                            m.vertices[static_cast<std::size_t>(b)])
                               .normalized());
      const int idx = static_cast<int>(m.vertices.size()) - 1;
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> faces;
    faces.reserve(m.faces.size() * 4);
    for (const auto& f : m.faces) {
      const int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
      faces.push_back({f[0], a, c});
      faces.push_back({f[1], b, a});
      faces.push_back({f[2], c, b});
      faces.push_back({a, b, c});
    }
    m.faces = std::move(faces);
  }
  for (auto& v : m.vertices) v *= radius;
  return m;
}

void write_off(std::ostream& os, const Mesh& mesh) {
  os << "OFF\n" << mesh.vertices.size() << " " << mesh.faces.size() << " 0\n";
  os.precision(17);
  for (const auto& v : mesh.vertices) os << v.x() << " " << v.y() << " " << v.z() << "\n";
  for (const auto& f : mesh.faces) os << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
}

MeshEigen mesh_eigenvalues(const Mesh& mesh, int count, int level) {
  const int N = static_cast<int>(mesh.vertices.size());
  if (count < 1 || count + 3 > N) throw std::invalid_argument("mesh_eigenvalues: bad count");
  using Sp = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> lt;
  RVector mass = RVector::Zero(N);
  for (const auto& f : mesh.faces) {
    const Eigen::Vector3d& a = mesh.vertices[static_cast<std::size_t>(f[0])];
    const Eigen::Vector3d& b = mesh.vertices[static_cast<std::size_t>(f[1])];
    const Eigen::Vector3d& c = mesh.vertices[static_cast<std::size_t>(f[2])];
    const double area = 0.5 * (b - a).cross(c - a).norm();
    if (!(area > 1e-15)) throw NumericalError("mesh_eigenvalues: degenerate triangle");
    const std::array<Eigen::Vector3d, 3> p{a, b, c};
    for (int k = 0; k < 3; ++k) {
      const int i = f[static_cast<std::size_t>((k + 1) % 3)];
      const int j = f[static_cast<std::size_t>((k + 2) % 3)];
      const Eigen::Vector3d u = p[static_cast<std::size_t>((k + 1) % 3)] - p[static_cast<std::size_t>(k)];
      const Eigen::Vector3d v = p[static_cast<std::size_t>((k + 2) % 3)] - p[static_cast<std::size_t>(k)];
      const double w = 0.5 * u.dot(v) / u.cross(v).norm();  // ½ cot of the angle at k
      lt.emplace_back(i, j, -w);
      lt.emplace_back(j, i, -w);
      lt.emplace_back(i, i, w);
      lt.emplace_back(j, j, w);
      mass(f[static_cast<std::size_t>(k)]) += area / 3.0;
    }
  }
  Sp L(N, N);
  L.setFromTriplets(lt.begin(), lt.end());
  Sp M(N, N);
  {
    std::vector<Eigen::Triplet<double>> mt;
    for (int i = 0; i < N; ++i) mt.emplace_back(i, i, mass(i));
    M.setFromTriplets(mt.begin(), mt.end());
  }
  const Sp A = L + M;  // shift σ = -1 keeps the factorized matrix positive definite
  Eigen::SimplicialLDLT<Sp> solver(A);
  if (solver.info() != Eigen::Success) throw NumericalError("mesh_eigenvalues: factorization failed");

  const int b = count + 3;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  RMatrix X(N, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < N; ++i) X(i, j) = nd(rng);

  RVector prev = RVector::Constant(count, -1.0);
  MeshEigen out;
  out.level = level;
  out.vertices = N;
  RVector mu;
  for (int it = 1; it <= 500; ++it) {
    const RMatrix Y = solver.solve(M * X);
    const RMatrix Kr = Y.transpose() * (L * Y);
    const RMatrix Mr = Y.transpose() * (M * Y);
    Eigen::GeneralizedSelfAdjointEigenSolver<RMatrix> es(0.5 * (Kr + Kr.transpose()),
                                                          0.5 * (Mr + Mr.transpose()));
    if (es.info() != Eigen::Success) throw NumericalError("mesh_eigenvalues: Rayleigh-Ritz failed");
    mu = es.eigenvalues();
    X = Y * es.eigenvectors();
    out.iterations = it;
    const RVector head = mu.head(count);
    if (((head - prev).array().abs() <= 1e-12 * head.array().abs().max(1.0)).all()) break;
    prev = head;
    if (it == 500) throw NumericalError("mesh_eigenvalues: subspace iteration did not converge");
  }
  out.riemannian.assign(mu.data(), mu.data() + count);
  out.lambda0 = out.riemannian[0];
  out.lambda1_complex = count > 1 ? 0.5 * out.riemannian[1] : 0.0;
  return out;
}

MeshStudy mesh_lambda1_cp1(int min_vertices) {
  if (min_vertices < 1000) throw std::invalid_argument("mesh_lambda1_cp1: need >= 1000 vertices");
  int level = 2;
  while (10 * (1 << (2 * level)) + 2 < min_vertices) ++level;
  const double radius = 1.0 / std::numbers::sqrt2;
  MeshStudy st;
  for (int l = level - 2; l <= level; ++l) st.levels.push_back(mesh_eigenvalues(icosphere(l, radius), 9, l));
  const double l0 = st.levels[0].lambda1_complex, l1 = st.levels[1].lambda1_complex,
               l2 = st.levels[2].lambda1_complex;
  st.richardson = (4.0 * l2 - l1) / 3.0;
  st.observed_rate = std::log2(std::abs(l0 - l1) / std::abs(l1 - l2));
  const auto& fine = st.levels.back();
  double c1 = 0.0, c2 = 0.0;
  for (int i = 1; i <= 3; ++i) c1 += fine.riemannian[static_cast<std::size_t>(i)] / 3.0;
  for (int i = 4; i <= 8; ++i) c2 += fine.riemannian[static_cast<std::size_t>(i)] / 5.0;
  st.cluster_ratio = c2 / c1;
  st.finest.method = "mesh";
  st.finest.n = 1;
  st.finest.lambda = fine.lambda1_complex;
  st.finest.lambda_riemannian = fine.riemannian[1];
  st.finest.residual = std::abs(st.richardson - fine.lambda1_complex) / st.richardson;
  return st;
}

}  // namespace kahler::spectral
