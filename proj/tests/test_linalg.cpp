#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "mwt/errors.hpp"
#include "mwt/linalg.hpp"

using namespace mwt;
using mwt::test::random_psd;
using mwt::test::rel_diff;

TEST_SUITE("linalg") {
  TEST_CASE("identity square root is the identity") {
    const PositiveMatrix r = matrix_power(PositiveMatrix::identity(2), 0.5);
    CHECK(rel_diff(r.matrix(), Matrix::Identity(2, 2)) < 1e-14);
  }

  TEST_CASE("diagonal square root") {
    const double d[] = {4.0, 9.0};
    const PositiveMatrix r = matrix_power(PositiveMatrix(HermitianMatrix::diagonal(d)), 0.5);
    CHECK(std::abs(r.matrix()(0, 0) - 2.0) < 1e-14);
    CHECK(std::abs(r.matrix()(1, 1) - 3.0) < 1e-14);
    CHECK(std::abs(r.matrix()(0, 1)) < 1e-14);
  }

  TEST_CASE("cube of the cube root recovers the matrix") {
    std::mt19937_64 rng(11);
    for (int m = 1; m <= 4; ++m) {
      const Matrix p = random_psd(m, rng);
      const PositiveMatrix r = matrix_power(PositiveMatrix(HermitianMatrix(p)), 1.0 / 3.0);
      CHECK(rel_diff(r.matrix() * r.matrix() * r.matrix(), p) < 1e-10);
    }
  }

  TEST_CASE("powers add") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
      const int m = 1 + trial % 4;
      const PositiveMatrix p(HermitianMatrix(random_psd(m, rng, 1e-3)));
      const Matrix lhs = matrix_power(p, 0.3).matrix() * matrix_power(p, -1.7).matrix();
      CHECK(rel_diff(lhs, matrix_power(p, -1.4).matrix()) < 1e-10);
      CHECK(rel_diff(matrix_power(p, 1.0).matrix(), p.matrix()) < 1e-12);
    }
  }

  TEST_CASE("operator norm examples") {
    CHECK(op_norm(Matrix::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-15));
    const double d[] = {2.0, 3.0};
    CHECK(op_norm(HermitianMatrix::diagonal(d).matrix()) == doctest::Approx(3.0).epsilon(1e-15));
  }

  TEST_CASE("commuted products of positive matrices share their norm") {
    std::mt19937_64 rng(13);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int m = 1 + trial % 3;
      const Matrix a = random_psd(m, rng, 0.0), b = random_psd(m, rng, 0.0);
      const double ab = op_norm(a * b), ba = op_norm(b * a);
      if (std::abs(ab - ba) > 1e-12 * std::max(ab, ba)) ++violations;
      if (op_norm(a * b) > op_norm(a) * op_norm(b) * (1.0 + 1e-12) + 1e-12) ++violations;
    }
    CHECK(violations == 0);
  }

  TEST_CASE("positive definiteness threshold") {
    CHECK(is_positive_definite(HermitianMatrix::identity(2), 1e-12));
    const double d0[] = {1.0, 0.0}, d1[] = {1.0, 1e-15};
    CHECK_FALSE(is_positive_definite(HermitianMatrix::diagonal(d0), 1e-12));
    CHECK_FALSE(is_positive_definite(HermitianMatrix::diagonal(d1), 1e-12));
  }

  TEST_CASE("non-Hermitian input is rejected") {
    Matrix a = Matrix::Identity(2, 2);
    a(0, 1) = 1.0;
    CHECK_THROWS_AS(HermitianMatrix{a}, InvalidArgumentError);
  }
}
