#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kahler {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Raised when a numerical routine cannot produce a trustworthy answer
/// (non-convergence, loss of definiteness, leaving a chart, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tolerances shared by every comparison in the toolkit.
///
/// `psd_slack` is the magnitude of negative eigenvalue admitted before a
/// Loewner check reports a violation.
struct TolerancePolicy {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double psd_slack = 1e-10;

  void validate() const;
};

/// Complex Hermitian matrix, immutable after construction.
///
/// Construction symmetrizes (M + M*)/2 and rejects inputs whose relative
/// asymmetry exceeds 1e-10 or which contain NaN/Inf.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const CMatrix& m, double max_rel_asymmetry = 1e-10);

  static HermitianMatrix identity(int n);
  static HermitianMatrix zero(int n);
  static HermitianMatrix diagonal(const std::vector<double>& d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;

 private:
  CMatrix m_;
};

/// Complex symmetric (unconjugated, M = M^T) matrix.
class SymmetricComplexMatrix {
 public:
  SymmetricComplexMatrix() = default;
  explicit SymmetricComplexMatrix(const CMatrix& m, double max_rel_asymmetry = 1e-10);

  static SymmetricComplexMatrix zero(int n);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

 private:
  CMatrix m_;
};

struct LoewnerVerdict {
  bool holds = false;
  double min_eigenvalue_of_gap = 0.0;
};

/// Ascending eigenvalues of a Hermitian matrix.
std::vector<double> hermitian_eigenvalues(const HermitianMatrix& a);

/// A <= B in the Loewner order, up to `tol.psd_slack`. The witness is
/// lambda_min(B - A).
LoewnerVerdict loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b,
                           const TolerancePolicy& tol);

/// D B D for a real invertible diagonal D, given by its diagonal.
HermitianMatrix congruence(const std::vector<double>& d, const HermitianMatrix& b);

/// Largest absolute entry.
double max_abs(const CMatrix& m);

}  // namespace kahler
