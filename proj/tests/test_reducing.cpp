#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "helpers.hpp"
#include "mwt/errors.hpp"
#include "mwt/reducing.hpp"

using namespace mwt;
using mwt::test::rel_diff;

namespace {

using RealMatrix = Eigen::MatrixXd;

// Independent reference: plain Khachiyan on the realified, 8-phase
// symmetrized point set in R^{2m}.
RealMatrix realified_mvee(const std::vector<Vector>& pts, int m) {
  std::vector<Eigen::VectorXd> q;
  for (const Vector& z : pts)
    for (int k = 0; k < 8; ++k) {
      const Vector r = z * std::polar(1.0, k * std::numbers::pi / 4.0);
      Eigen::VectorXd x(2 * m);
      for (int i = 0; i < m; ++i) {
        x(i) = r(i).real();
        x(m + i) = r(i).imag();
      }
      q.push_back(x);
    }
  const double d = 2 * m;
  std::vector<double> u(q.size(), 1.0 / static_cast<double>(q.size()));
  RealMatrix x;
  for (int it = 0; it < 200000; ++it) {
    x = RealMatrix::Zero(2 * m, 2 * m);
    for (std::size_t k = 0; k < q.size(); ++k) x += u[k] * q[k] * q[k].transpose();
    const Eigen::LLT<RealMatrix> llt(x);
    std::size_t j = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double mk = q[k].dot(llt.solve(q[k]));
      if (mk > best) best = mk, j = k;
    }
    if (best / d - 1.0 < 1e-9) break;
    const double a = (best - d) / (d * (best - 1.0));
    for (double& v : u) v *= 1.0 - a;
    u[j] += a;
  }
  return (d * x).inverse();
}

}  // namespace

TEST_SUITE("reducing") {
  TEST_CASE("cube norm examples") {
    const Box q = Box::cube(1, Point{0.0}, 0.5);
    Vector z = Vector::Zero(2);
    z(0) = 1.0;
    CHECK(cube_norm(MatrixWeight::identity(1, 2), 1.3, q, z, {}) == doctest::Approx(1.0).epsilon(1e-12));
    const MatrixWeight four = MatrixWeight::constant(1, PositiveMatrix::scalar(2, 4.0));
    CHECK(cube_norm(four, 2.0, q, z, {}) == doctest::Approx(2.0).epsilon(1e-12));
    const MatrixWeight w = MatrixWeight::power_log(1, 1, -0.5, 0.0);
    Vector e1 = Vector::Ones(1);
    CHECK(cube_norm(w, 1.0, Box::cube(1, Point{0.0}, 1.0), e1, {}) == doctest::Approx(2.0).epsilon(1e-4));
  }

  TEST_CASE("complex MVEE agrees with the realified reference") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int m = 1; m <= 3; ++m) {
      std::vector<Vector> pts;
      for (int k = 0; k < 12; ++k) {
        Vector z(m);
        for (int i = 0; i < m; ++i) z(i) = cplx(g(rng), g(rng));
        pts.push_back(z);
      }
      const MveeResult c = mvee(pts, 1e-9, 200000);
      const RealMatrix r = realified_mvee(pts, m);
      RealMatrix lifted(2 * m, 2 * m);
      lifted << c.h.real(), -c.h.imag(), c.h.imag(), c.h.real();
      CAPTURE(m);
      // Both solvers stop at a 1e-9 rounding gap, which bounds h only to about its square root.
      CHECK((lifted - r).norm() < 1e-4 * r.norm());
    }
  }

  TEST_CASE("constant weights reduce to scalar multiples") {
    const MatrixWeight w = MatrixWeight::constant(1, PositiveMatrix::scalar(2, 3.0));
    const Box q = Box::cube(1, Point{0.0}, 0.25);
    for (double p : {0.5, 1.0, 2.0, 3.0}) {
      for (ReduceMethod method : {ReduceMethod::automatic, ReduceMethod::mvee}) {
        ReduceOptions opt;
        opt.method = method;
        const Matrix a = reduce(w, p, q, opt).a.matrix();
        CHECK(rel_diff(a, std::pow(3.0, 1.0 / p) * Matrix::Identity(2, 2)) < 1e-3);
      }
    }
  }

  TEST_CASE("scaling equivariance") {
    const MatrixWeight w = MatrixWeight::conjugated_block(1, -0.3, 0.2, 1.0);
    const Box q = Box::cube(1, Point{0.05}, 0.25);
    ReduceOptions opt;
    opt.method = ReduceMethod::mvee;
    const double p = 1.5, c = 5.0;
    const Matrix a = reduce(w, p, q, opt).a.matrix(), ac = reduce(w.scaled(c), p, q, opt).a.matrix();
    CHECK(rel_diff(ac, std::pow(c, 1.0 / p) * a) < 1e-3);
  }

  TEST_CASE("MVEE matches the exact operator at p = 2") {
    const MatrixWeight w = MatrixWeight::conjugated_block(1, -0.3, 0.2, 1.0);
    for (int j = 0; j <= 3; ++j) {
      const Box q = Box::cube(1, Point{-0.5 + 0.25 * j}, 0.25);
      ReduceOptions exact, fit;
      exact.method = ReduceMethod::exact_p2;
      fit.method = ReduceMethod::mvee;
      const Matrix a = reduce(w, 2.0, q, exact).a.matrix(), b = reduce(w, 2.0, q, fit).a.matrix();
      CHECK(op_norm(a - b) / op_norm(a) < 0.05);
    }
    ReduceOptions exact;
    exact.method = ReduceMethod::exact_p2;
    CHECK_THROWS_AS(reduce(w, 1.0, Box::cube(1, Point{0.0}, 0.25), exact), Error);
  }

  TEST_CASE("exact operator bracket is tight for scalar weights") {
    const MatrixWeight w = MatrixWeight::power_log(1, 1, -0.5, 0.0);
    const Box q = Box::cube(1, Point{0.0}, 0.25);
    ReduceOptions opt;
    opt.method = ReduceMethod::exact_p2;
    const ReducingCheck chk = verify_reducing(reduce(w, 2.0, q, opt).a, w, 2.0, q, 64, {});
    CHECK(chk.vectors.lo > 1.0 - 1e-6);
    CHECK(chk.vectors.hi < 1.0 + 1e-6);
  }

  TEST_CASE("MVEE bracket at p = 1 stays within the John bound") {
    const MatrixWeight w = MatrixWeight::power_log(1, 2, -0.5, 0.0);
    const Box q = Box::cube(1, Point{0.0}, 0.25);
    ReduceOptions opt;
    opt.method = ReduceMethod::mvee;
    const ReducingCheck chk = verify_reducing(reduce(w, 1.0, q, opt).a, w, 1.0, q, 64, {});
    CHECK(chk.vectors.lo >= 0.2);
    CHECK(chk.vectors.hi <= 5.0);
  }

  TEST_CASE("dual reducing operators") {
    const MatrixWeight c = MatrixWeight::constant(1, PositiveMatrix::scalar(2, 4.0));
    const Box q = Box::cube(1, Point{0.0}, 0.25);
    ReduceOptions opt;
    const Matrix a = reduce(c, 2.0, q, opt).a.matrix(), ad = dual_reduce(c, 2.0, q, opt).a.matrix();
    CHECK(rel_diff(ad, 0.5 * Matrix::Identity(2, 2)) < 1e-10);
    CHECK(op_norm(a * ad) == doctest::Approx(1.0).epsilon(1e-10));

    const MatrixWeight w = MatrixWeight::conjugated_block(1, -0.3, 0.2, 1.0);
    const Matrix ainv = reduce(w, 2.0, q, opt).a.inverse().matrix();
    const Matrix at = dual_reduce(w, 2.0, q, opt).a.matrix();
    double worst = 0.0;
    for (const Vector& z : sphere_directions(2, 64)) {
      const double r = (ainv * z).norm() / (at * z).norm();
      worst = std::max({worst, r, 1.0 / r});
    }
    CHECK(worst <= 3.0);
  }

  TEST_CASE("identity family on the identity weight") {
    const CubeWindow win = CubeWindow::make(1, 0, 3, default_domain(1));
    const ReducingFamily fam = ReducingFamily::identity(win, 2, 2.0);
    for (const auto& q : win.all_cubes()) CHECK(rel_diff(fam.at(q).matrix(), Matrix::Identity(2, 2)) == 0.0);
    const ReducingFamily built = ReducingFamily::build(MatrixWeight::identity(1, 2), 1.5, win, {});
    const Bracket b = built.overall_bracket();
    CHECK(b.lo == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.hi == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("family round trip through JSON") {
    const MatrixWeight w = MatrixWeight::conjugated_block(1, -0.3, 0.2, 1.0);
    const CubeWindow win = CubeWindow::make(1, 0, 2, w.domain());
    const ReducingFamily fam = ReducingFamily::build(w, 2.0, win, {});
    const auto path = std::filesystem::temp_directory_path() / "mwt_family_roundtrip.json";
    fam.save(path);
    const ReducingFamily back = ReducingFamily::load(path);
    std::filesystem::remove(path);
    for (const auto& q : win.all_cubes()) CHECK(rel_diff(back.at(q).matrix(), fam.at(q).matrix()) < 1e-15);
    CHECK(back.key() == fam.key());
    CHECK_THROWS_AS(fam.at(DyadicCube{1, 3, {0}}), CoverageError);
  }

  TEST_CASE("integrability probe on the identity") {
    const CubeWindow win = CubeWindow::make(1, 0, 2, default_domain(1));
    const ReducingFamily fam = ReducingFamily::identity(win, 1, 2.0);
    const ProbeTable t = integrability_probe(MatrixWeight::identity(1, 1), 2.0, fam, {1.0, 2.0, 3.0}, {});
    for (const auto& row : t.rows) {
      CHECK(row.forward == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(row.inverse == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}
