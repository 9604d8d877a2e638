#include "mwt/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "mwt/errors.hpp"

namespace mwt {

namespace {

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != cplx(0.0, 0.0)) return false;
  return true;
}

}  // namespace

HermitianMatrix::HermitianMatrix(const Matrix& m, double tol) : m_(m) {
  if (m.rows() != m.cols() || m.rows() < 1 || m.rows() > kMaxMatrixDim)
    throw InvalidArgumentError("hermitian matrix must be square with 1 <= m <= 4");
  double scale = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        throw InvalidArgumentError("hermitian matrix has non-finite entries");
      scale = std::max(scale, std::abs(m(i, j)));
    }
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol * std::max(scale, 1e-300))
        throw InvalidArgumentError("matrix is not Hermitian");
  // Symmetrize so downstream eigensolvers see an exactly Hermitian input.
  m_ = (m + m.adjoint()) * 0.5;
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  return HermitianMatrix(Matrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> diag) {
  const auto dim = static_cast<Eigen::Index>(diag.size());
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
  return HermitianMatrix(m);
}

EigenSystem eigensystem(const HermitianMatrix& h) {
  const Matrix& m = h.matrix();
  EigenSystem out;
  if (is_diagonal(m)) {
    // Keep the exact diagonal; sort ascending like the general path.
    const auto dim = m.rows();
    std::array<int, kMaxMatrixDim> order{};
    for (int i = 0; i < dim; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.begin() + dim,
              [&](int a, int b) { return m(a, a).real() < m(b, b).real(); });
    out.values.resize(dim);
    out.vectors = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      const int src = order[static_cast<std::size_t>(i)];
      out.values(i) = m(src, src).real();
      out.vectors(src, i) = 1.0;
    }
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw DegenerateMatrixError("eigensolver failed");
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  return out;
}

double lambda_min(const HermitianMatrix& h) { return eigensystem(h).values.minCoeff(); }
double lambda_max(const HermitianMatrix& h) { return eigensystem(h).values.maxCoeff(); }

bool is_positive_definite(const HermitianMatrix& h, double tol) { return lambda_min(h) > tol; }

bool is_positive_definite(const HermitianMatrix& h) {
  return is_positive_definite(h, 1e-12 * std::abs(h.trace()));
}

HermitianMatrix hermitian_part(const Matrix& a) { return HermitianMatrix((a + a.adjoint()) * 0.5); }

PositiveMatrix::PositiveMatrix(const HermitianMatrix& h)
    : PositiveMatrix(h, 1e-12 * std::abs(h.trace())) {}

PositiveMatrix::PositiveMatrix(const HermitianMatrix& h, double tol) : base_(h) {
  const double lo = lambda_min(h);
  if (!(lo > tol))
    throw DegenerateMatrixError("matrix is not positive definite: lambda_min = " +
                                std::to_string(lo));
}

PositiveMatrix PositiveMatrix::identity(int dim) {
  return PositiveMatrix(Matrix::Identity(dim, dim), Trusted{});
}

PositiveMatrix PositiveMatrix::scalar(int dim, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DegenerateMatrixError("scalar weight must be positive");
  return PositiveMatrix(Matrix::Identity(dim, dim) * c, Trusted{});
}

PositiveMatrix PositiveMatrix::inverse() const { return matrix_power(*this, -1.0); }

PositiveMatrix positive_from_spectrum(const Matrix& vectors, const RealVector& values) {
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (!(values(i) > 0.0) || !std::isfinite(values(i)))
      throw DegenerateMatrixError("spectrum must be positive and finite");
  Matrix out = vectors * values.cast<cplx>().asDiagonal() * vectors.adjoint();
  out = (out + out.adjoint()) * 0.5;
  return PositiveMatrix(out, PositiveMatrix::Trusted{});
}

PositiveMatrix matrix_power(const PositiveMatrix& p, double alpha) {
  const Matrix& m = p.matrix();
  if (alpha == 1.0) return p;
  if (is_diagonal(m)) {
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double v = m(i, i).real();
      if (!(v > 0.0)) throw DegenerateMatrixError("non-positive diagonal entry in matrix_power");
      out(i, i) = std::pow(v, alpha);
    }
    return PositiveMatrix(out, PositiveMatrix::Trusted{});
  }
  EigenSystem es = eigensystem(p.hermitian());
  const double top = es.values.maxCoeff();
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    if (!(es.values(i) > 1e-12 * top))
      throw DegenerateMatrixError("eigenvalue collapsed below 1e-12 * lambda_max in matrix_power");
    es.values(i) = std::pow(es.values(i), alpha);
  }
  return positive_from_spectrum(es.vectors, es.values);
}

double op_norm(const Matrix& a) {
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  if (a.rows() == 2 && a.cols() == 2) {
    // Largest eigenvalue of the Gram matrix, written without cancellation.
    const double p = std::norm(a(0, 0)) + std::norm(a(1, 0));
    const double q = std::norm(a(0, 1)) + std::norm(a(1, 1));
    const cplx r = std::conj(a(0, 0)) * a(0, 1) + std::conj(a(1, 0)) * a(1, 1);
    const double top = 0.5 * (p + q) + std::hypot(0.5 * (p - q), std::abs(r));
    return std::sqrt(top);
  }
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

}  // namespace mwt
