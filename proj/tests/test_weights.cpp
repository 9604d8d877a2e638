#include <doctest.h>

#include <cmath>

#include "mwt/errors.hpp"
#include "mwt/weights.hpp"

using namespace mwt;

TEST_SUITE("weights") {
  TEST_CASE("power-log evaluation") {
    const MatrixWeight flat = MatrixWeight::power_log(1, 2, 0.0, 0.0);
    CHECK((flat.evaluate(Point{0.3}).matrix() - Matrix::Identity(2, 2)).norm() < 1e-15);
    const MatrixWeight w = MatrixWeight::power_log(1, 2, -0.5, 0.0);
    const Matrix at4 = w.evaluate(Point{4.0}).matrix();
    CHECK(std::abs(at4(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(at4(1, 1) - 0.5) < 1e-15);
    CHECK_THROWS_AS(w.evaluate(Point{0.0}), SingularityError);
    CHECK_THROWS_AS(MatrixWeight::power_log(1, 1, -1.0, 0.0), Error);
  }

  TEST_CASE("two-singularity evaluation") {
    const Point x0{0.25};
    const double d = 0.4, dt = 0.3, p = 2.0;
    const MatrixWeight w = MatrixWeight::two_singularity(1, 1, d, dt, p, x0);
    for (double x : {-0.4, -0.1, 0.1, 0.2, 0.45}) {
      const double expect = std::pow(std::abs(x), -d) * std::pow(std::abs(x - 0.25), (p - 1) * dt);
      CHECK(w.evaluate(Point{x}).matrix()(0, 0).real() == doctest::Approx(expect).epsilon(1e-13));
    }
  }

  TEST_CASE("conjugated block does not commute across points") {
    const MatrixWeight w = MatrixWeight::conjugated_block(1, -0.3, 0.2, 1.0);
    const Matrix a = w.evaluate(Point{0.1}).matrix(), b = w.evaluate(Point{0.35}).matrix();
    CHECK((a * b - b * a).norm() > 1e-3);
    CHECK_FALSE(w.is_scalar());
  }

  TEST_CASE("constant-weight cube average") {
    const MatrixWeight w = MatrixWeight::constant(1, PositiveMatrix::scalar(2, 2.0));
    const Box q = Box::cube(1, Point{-0.25}, 0.5);
    CHECK(cube_average_matrix_norm(w, 2.0, q, Matrix::Identity(2, 2), {}) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    const MatrixWeight id = MatrixWeight::identity(1, 2);
    CHECK(cube_average_matrix_norm(id, 0.7, q, Matrix::Identity(2, 2), {}) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("power-law cube averages follow the side length") {
    const double a = -0.5, p = 2.0;
    const MatrixWeight w = MatrixWeight::power_log(1, 1, a, 0.0);
    for (int j = 1; j <= 6; ++j) {
      const double l = std::ldexp(1.0, -j);
      const double v = cube_average_matrix_norm(w, p, Box::cube(1, Point{0.0}, l), Matrix::Identity(1, 1), {});
      const double ratio = v / std::pow(l, a / p);
      CHECK(ratio > 0.5);
      CHECK(ratio < 2.0);
    }
  }

  TEST_CASE("A_p constants of the identity") {
    const MatrixWeight id = MatrixWeight::identity(1, 2);
    const CubeWindow win = CubeWindow::make(1, 0, 3, id.domain());
    CHECK(ap_constant(id, 2.0, win, ApVariant::standard, {}).value == doctest::Approx(1.0).epsilon(1e-12));
    const double std_v = ap_constant(id, 0.5, win, ApVariant::standard, {}).value;
    const double star_v = ap_constant(id, 0.5, win, ApVariant::star, {}).value;
    CHECK(std_v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(star_v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(ap_constant(id, 2.0, win, ApVariant::star, {}), InvalidArgumentError);
  }

  TEST_CASE("standard never exceeds star for p at most one") {
    const MatrixWeight w = MatrixWeight::power_log(1, 1, -0.5, 0.0);
    const CubeWindow win = CubeWindow::make(1, 0, 3, w.domain());
    const double s = ap_constant(w, 1.0, win, ApVariant::standard, {}).value;
    const double t = ap_constant(w, 1.0, win, ApVariant::star, {}).value;
    CHECK(s <= t);
    CHECK(std::isfinite(t));
  }

  TEST_CASE("A_2 constant of a power weight is finite and stable") {
    const MatrixWeight w = MatrixWeight::power_log(1, 1, 0.5, 0.0);
    const CubeWindow win = CubeWindow::make(1, 0, 4, w.domain());
    QuadratureSpec fine;
    fine.order = 10;
    const double coarse = ap_constant(w, 2.0, win, ApVariant::standard, {}).value;
    const double refined = ap_constant(w, 2.0, win, ApVariant::standard, fine).value;
    CHECK(std::isfinite(coarse));
    CHECK(std::abs(coarse - refined) < 1e-3 * refined);
  }

  TEST_CASE("dual weights") {
    const auto params = dual_weight(MatrixWeight::power_log(1, 1, 0.6, 0.0), 3.0).power_log_params();
    REQUIRE(params.has_value());
    CHECK((*params)[0] == doctest::Approx(-0.3));
    CHECK((*params)[1] == doctest::Approx(0.0));
    CHECK_THROWS_AS(dual_weight(MatrixWeight::identity(1, 1), 1.0), InvalidArgumentError);

    const Point x0{0.25};
    const MatrixWeight w = MatrixWeight::two_singularity(1, 1, 0.4, 0.3, 2.5, x0);
    const MatrixWeight wd = dual_weight(w, 2.5);
    const double x = 0.1;
    const double expect = std::pow(std::abs(x - 0.25), -0.3) * std::pow(std::abs(x), 0.4 / 1.5);
    CHECK(wd.evaluate(Point{x}).matrix()(0, 0).real() == doctest::Approx(expect).epsilon(1e-12));

    const MatrixWeight cb = MatrixWeight::conjugated_block(1, -0.3, 0.2, 1.0);
    const MatrixWeight back = dual_weight(dual_weight(cb, 3.0), 1.5);
    for (double y : {-0.3, 0.05, 0.4}) {
      const Matrix a = back.evaluate(Point{y}).matrix(), b = cb.evaluate(Point{y}).matrix();
      CHECK((a - b).norm() < 1e-10 * b.norm());
    }
  }

  TEST_CASE("analytic ball averages") {
    const BallAverage flat = analytic_ball_average(0.0, 0.0, Point{0.7}, 0.3, 1);
    CHECK(flat.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(flat.envelope == doctest::Approx(1.0).epsilon(1e-12));
    const BallAverage sing = analytic_ball_average(-0.5, 0.0, Point{0.0}, 1.0, 1);
    CHECK(sing.value == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(sing.envelope == doctest::Approx(1.0).epsilon(1e-12));
    const BallAverage off = analytic_ball_average(-0.5, 0.0, Point{0.3}, 1.0, 1);
    CHECK(off.value == doctest::Approx(std::sqrt(0.7) + std::sqrt(1.3)).epsilon(1e-6));
    CHECK_THROWS_AS(analytic_ball_average(-1.0, 0.0, Point{0.0}, 1.0, 1), IntegrabilityError);
    double lo = 1e300, hi = 0.0;
    for (double lx = -3; lx <= 3; lx += 1.0)
      for (double lr = -3; lr <= 3; lr += 1.0) {
        const double ratio = analytic_ball_average(-0.5, 1.0, Point{std::pow(10.0, lx)}, std::pow(10.0, lr), 1).ratio;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    CHECK(hi / lo < 10.0);
  }
}
