#pragma once

// Small dense Hermitian kernel. Matrices here are m x m with m <= 4, so all
// storage is fixed-capacity and nothing touches the heap.

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace mwt {

using cplx = std::complex<double>;

inline constexpr int kMaxMatrixDim = 4;

using Matrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxMatrixDim, kMaxMatrixDim>;
using Vector = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, kMaxMatrixDim, 1>;
using RealVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxMatrixDim, 1>;

/// A validated m x m Hermitian matrix with finite entries.
class HermitianMatrix {
 public:
  /// Throws InvalidArgumentError unless `m` is square, finite and Hermitian
  /// to within `tol` (relative to the largest entry).
  explicit HermitianMatrix(const Matrix& m, double tol = 1e-12);

  static HermitianMatrix identity(int dim);
  static HermitianMatrix diagonal(std::span<const double> diag);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }

 private:
  struct Unchecked {};
  HermitianMatrix(const Matrix& m, Unchecked) : m_(m) {}
  friend class PositiveMatrix;

  Matrix m_;
};

/// Eigen-decomposition U diag(lambda) U* of a Hermitian matrix, eigenvalues ascending.
struct EigenSystem {
  RealVector values;
  Matrix vectors;
};

EigenSystem eigensystem(const HermitianMatrix& h);

/// A Hermitian matrix whose smallest eigenvalue exceeds the positivity tolerance.
class PositiveMatrix {
 public:
  /// Default tolerance is 1e-12 * trace.
  explicit PositiveMatrix(const HermitianMatrix& h);
  PositiveMatrix(const HermitianMatrix& h, double tol);

  static PositiveMatrix identity(int dim);
  /// c * I with c > 0.
  static PositiveMatrix scalar(int dim, double c);

  int dim() const { return base_.dim(); }
  const HermitianMatrix& hermitian() const { return base_; }
  const Matrix& matrix() const { return base_.matrix(); }

  PositiveMatrix inverse() const;

 private:
  struct Trusted {};
  PositiveMatrix(const Matrix& m, Trusted) : base_(m, HermitianMatrix::Unchecked{}) {}
  friend PositiveMatrix matrix_power(const PositiveMatrix&, double);
  friend PositiveMatrix positive_from_spectrum(const Matrix&, const RealVector&);

  HermitianMatrix base_;
};

/// U diag(lambda^alpha) U*. Throws DegenerateMatrixError if an eigenvalue has
/// collapsed below 1e-12 * lambda_max.
PositiveMatrix matrix_power(const PositiveMatrix& p, double alpha);

/// Builds U diag(values) U* from an orthonormal `vectors` and positive `values`.
PositiveMatrix positive_from_spectrum(const Matrix& vectors, const RealVector& values);

/// Operator norm induced by the Euclidean norm (largest singular value).
double op_norm(const Matrix& a);

double lambda_min(const HermitianMatrix& h);
double lambda_max(const HermitianMatrix& h);

bool is_positive_definite(const HermitianMatrix& h, double tol);
/// Uses the default tolerance 1e-12 * trace.
bool is_positive_definite(const HermitianMatrix& h);

/// Projects an arbitrary square matrix onto its Hermitian part (A + A*) / 2.
HermitianMatrix hermitian_part(const Matrix& a);

}  // namespace mwt
