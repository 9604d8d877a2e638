#pragma once

#include <random>

#include "mwt/linalg.hpp"

namespace mwt::test {

inline Matrix random_matrix(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = cplx(g(rng), g(rng));
  return a;
}

/// B B* + shift I, Hermitian positive definite.
inline Matrix random_psd(int m, std::mt19937_64& rng, double shift = 0.1) {
  const Matrix b = random_matrix(m, rng);
  Matrix p = b * b.adjoint() + shift * Matrix::Identity(m, m);
  return 0.5 * (p + p.adjoint());
}

inline double rel_diff(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace mwt::test
