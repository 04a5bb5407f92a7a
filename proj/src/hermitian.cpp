#include "kahler/hermitian.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace kahler {

namespace {

void require_finite(const CMatrix& m, const char* what) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
        throw std::invalid_argument(std::string(what) + ": non-finite entry");
      }
    }
  }
}

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
  }
}

}  // namespace

double max_abs(const CMatrix& m) {
  double v = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) v = std::max(v, std::abs(m(i, j)));
  return v;
}

void TolerancePolicy::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(psd_slack > 0.0)) {
    throw std::invalid_argument("TolerancePolicy: all tolerances must be strictly positive");
  }
}

HermitianMatrix::HermitianMatrix(const CMatrix& m, double max_rel_asymmetry) {
  require_square(m, "HermitianMatrix");
  require_finite(m, "HermitianMatrix");
  const double scale = std::max(max_abs(m), 1e-300);
  const double asym = max_abs(m - m.adjoint());
  if (asym > max_rel_asymmetry * scale && asym > 1e-300) {
    std::ostringstream os;
    os << "HermitianMatrix: relative asymmetry " << asym / scale << " exceeds "
       << max_rel_asymmetry;
    throw std::invalid_argument(os.str());
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::identity(int n) {
  return HermitianMatrix(CMatrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::zero(int n) { return HermitianMatrix(CMatrix::Zero(n, n)); }

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& d) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return HermitianMatrix(m);
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  if (o.dim() != dim()) throw std::invalid_argument("HermitianMatrix: dimension mismatch");
  return HermitianMatrix(m_ + o.m_);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  if (o.dim() != dim()) throw std::invalid_argument("HermitianMatrix: dimension mismatch");
  return HermitianMatrix(m_ - o.m_);
}

HermitianMatrix HermitianMatrix::operator*(double s) const { return HermitianMatrix(m_ * s); }

SymmetricComplexMatrix::SymmetricComplexMatrix(const CMatrix& m, double max_rel_asymmetry) {
  require_square(m, "SymmetricComplexMatrix");
  require_finite(m, "SymmetricComplexMatrix");
  const double scale = std::max(max_abs(m), 1e-300);
  const double asym = max_abs(m - m.transpose());
  if (asym > max_rel_asymmetry * scale && asym > 1e-300) {
    std::ostringstream os;
    os << "SymmetricComplexMatrix: relative asymmetry " << asym / scale << " exceeds "
       << max_rel_asymmetry;
    throw std::invalid_argument(os.str());
  }
  m_ = 0.5 * (m + m.transpose());
}

SymmetricComplexMatrix SymmetricComplexMatrix::zero(int n) {
  return SymmetricComplexMatrix(CMatrix::Zero(n, n));
}

std::vector<double> hermitian_eigenvalues(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix());
  if (es.info() != Eigen::Success) {
    throw NumericalError("hermitian_eigenvalues: QR iteration did not converge within " +
                         std::to_string(Eigen::SelfAdjointEigenSolver<CMatrix>::m_maxIterations) +
                         "*n sweeps");
  }
  const double norm = std::max(a.matrix().norm(), 1e-300);
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  std::vector<double> out(static_cast<std::size_t>(vals.size()));
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    const double res = (a.matrix() * vecs.col(k) - vals(k) * vecs.col(k)).norm();
    if (res > 1e-10 * norm && res > 1e-280) {
      throw NumericalError("hermitian_eigenvalues: eigenpair residual " + std::to_string(res) +
                           " exceeds 1e-10*|A|");
    }
    out[static_cast<std::size_t>(k)] = vals(k);
  }
  return out;
}

LoewnerVerdict loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b,
                           const TolerancePolicy& tol) {
  if (a.dim() != b.dim()) throw std::invalid_argument("loewner_leq: dimension mismatch");
  const auto ev = hermitian_eigenvalues(b - a);
  LoewnerVerdict v;
  v.min_eigenvalue_of_gap = ev.front();
  v.holds = ev.front() >= -tol.psd_slack;
  return v;
}

HermitianMatrix congruence(const std::vector<double>& d, const HermitianMatrix& b) {
  if (static_cast<int>(d.size()) != b.dim()) {
    throw std::invalid_argument("congruence: dimension mismatch");
  }
  CMatrix out = b.matrix();
  for (int i = 0; i < b.dim(); ++i) {
    if (d[static_cast<std::size_t>(i)] == 0.0 || !std::isfinite(d[static_cast<std::size_t>(i)])) {
      throw std::invalid_argument("congruence: D must be finite and invertible");
    }
  }
  for (int i = 0; i < b.dim(); ++i)
    for (int j = 0; j < b.dim(); ++j) out(i, j) *= d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(j)];
  return HermitianMatrix(out);
}

}  // namespace kahler
