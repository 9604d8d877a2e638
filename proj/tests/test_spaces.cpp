#include <doctest.h>

#include <cmath>
#include <random>

#include "mwt/errors.hpp"
#include "mwt/spaces.hpp"

using namespace mwt;

namespace {

CoefficientField random_field(const CubeWindow& win, int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CoefficientField t = CoefficientField::zeros(win, m);
  for (auto& v : t.values) v = cplx(g(rng), g(rng));
  return t;
}

}  // namespace

TEST_SUITE("spaces") {
  TEST_CASE("criticality") {
    CHECK(classify({0.0, 1.0, 2.0, 2.0, SpaceKind::F}) == Criticality::supercritical);
    CHECK(classify({0.0, 0.5, 2.0, 3.0, SpaceKind::F}) == Criticality::critical);
    CHECK(classify({0.0, 0.0, 2.0, 2.0, SpaceKind::B}) == Criticality::subcritical);
    CHECK_THROWS_AS((SpaceParams{0.0, -0.1, 2.0, 2.0, SpaceKind::B}.validate()), InvalidArgumentError);
    CHECK_THROWS_AS((SpaceParams{0.0, 0.0, 0.0, 2.0, SpaceKind::B}.validate()), InvalidArgumentError);
  }

  TEST_CASE("level-field norms of trivial data") {
    const CubeWindow win = CubeWindow::unit(1, 0, 3);
    LevelFamily f{1, Box::unit(1), {}};
    for (int j = 0; j <= 3; ++j) f.levels.push_back({j, 3, std::vector<double>(8, 0.0)});
    for (SpaceKind k : {SpaceKind::B, SpaceKind::F})
      CHECK(la_tau_norm(f, {0.0, 0.0, 2.0, 2.0, k}, win).value == 0.0);
    f.levels[2].values.assign(8, 1.0);
    for (SpaceKind k : {SpaceKind::B, SpaceKind::F})
      for (double p : {0.5, 1.0, 3.0})
        for (double q : {0.5, 2.0, kInf})
          CHECK(la_tau_norm(f, {0.0, 0.0, p, q, k}, win).value == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("single atom closed form") {
    const CubeWindow win = CubeWindow::unit(1, 0, 4);
    CoefficientField t = CoefficientField::zeros(win, 2);
    const DyadicCube q0{1, 2, {1}};
    t.at(q0)[0] = 1.0;
    const double s = 0.5, tau = 0.1;
    for (double p : {1.0, 2.0, 3.0})
      for (SpaceKind k : {SpaceKind::B, SpaceKind::F}) {
        const double expect = std::pow(2.0, 2 * s) * std::pow(0.25, 1.0 / p - 0.5 - tau);
        CHECK(seq_norm(t, {s, tau, p, 2.0, k}, Weighting::none()).value == doctest::Approx(expect).epsilon(1e-12));
      }
  }

  TEST_CASE("identity weight and identity family agree exactly") {
    std::mt19937_64 rng(51);
    const CubeWindow win = CubeWindow::make(1, 0, 4, default_domain(1));
    const MatrixWeight id = MatrixWeight::identity(1, 2);
    const ReducingFamily fam = ReducingFamily::identity(win, 2, 2.0);
    const CoefficientField t = random_field(win, 2, rng);
    const SpaceParams sp{0.3, 0.2, 2.0, 1.5, SpaceKind::F};
    const double a = seq_norm(t, sp, Weighting::by_weight(id, 2.0)).value;
    const double b = seq_norm(t, sp, Weighting::by_family(fam)).value;
    const double c = seq_norm(t, sp, Weighting::none()).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-13));
    CHECK(a == doctest::Approx(c).epsilon(1e-13));
  }

  TEST_CASE("homogeneity and quasi-triangle inequality") {
    std::mt19937_64 rng(52);
    const CubeWindow win = CubeWindow::unit(1, 0, 4);
    for (const SpaceParams sp : {SpaceParams{0.0, 0.0, 0.5, 1.0, SpaceKind::B}, SpaceParams{0.5, 0.25, 2.0, 3.0, SpaceKind::F}}) {
      const CoefficientField t = random_field(win, 1, rng), u = random_field(win, 1, rng);
      CoefficientField ct = t, sum = t;
      for (std::size_t i = 0; i < t.values.size(); ++i) {
        ct.values[i] *= 3.0;
        sum.values[i] += u.values[i];
      }
      const double nt = seq_norm(t, sp, Weighting::none()).value;
      CHECK(seq_norm(ct, sp, Weighting::none()).value == doctest::Approx(3.0 * nt).epsilon(1e-13));
      const double kappa = std::min({1.0, sp.p, sp.q});
      const double lhs = std::pow(seq_norm(sum, sp, Weighting::none()).value, kappa);
      const double rhs = std::pow(nt, kappa) + std::pow(seq_norm(u, sp, Weighting::none()).value, kappa);
      CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
  }

  TEST_CASE("p = infinity norm equals the tau = 1/q Triebel-Lizorkin norm") {
    std::mt19937_64 rng(53);
    const CubeWindow win = CubeWindow::unit(1, 0, 5);
    const CoefficientField t = random_field(win, 1, rng);
    for (double q : {0.5, 1.0, 2.0, 3.5}) {
      const double a = finfty_norm(t, 0.25, q, Weighting::none()).value;
      const double b = seq_norm(t, {0.25, 1.0 / q, q, q, SpaceKind::F}, Weighting::none()).value;
      CHECK(std::abs(a - b) <= 1e-12 * b);
    }
  }

  TEST_CASE("identity checks pass on random data") {
    std::mt19937_64 rng(54);
    const CubeWindow win = CubeWindow::unit(1, 0, 5);
    for (int draw = 0; draw < 20; ++draw) {
      const CoefficientField t = random_field(win, 1, rng);
      for (const SpaceParams sp : {SpaceParams{0.0, 0.5, 2.0, kInf, SpaceKind::B}, SpaceParams{0.3, 0.8, 2.0, 2.0, SpaceKind::F},
                                   SpaceParams{0.0, 0.0, 1.5, 0.7, SpaceKind::F}}) {
        const IdentityReport r = identity_checks(t, sp, Weighting::none());
        CHECK(r.all_passed());
      }
    }
  }

  TEST_CASE("maximal sequence") {
    const CubeWindow win = CubeWindow::unit(1, 2, 2);
    CoefficientField t = CoefficientField::zeros(win, 1);
    const DyadicCube q0{1, 2, {1}};
    t.at(q0)[0] = 2.0;
    const CoefficientField s = maximal_sequence(t, 1.0, 3.0);
    for (const auto& q : win.level_cubes(2)) {
      const double dist = std::abs(static_cast<double>(q.index[0] - 1));
      CHECK(std::abs(s.at(q)[0]) == doctest::Approx(2.0 / std::pow(1.0 + dist, 3.0)).epsilon(1e-14));
    }
    std::mt19937_64 rng(55);
    const CoefficientField r = random_field(CubeWindow::unit(1, 0, 4), 1, rng);
    const CoefficientField big = maximal_sequence(r, 1.0, 200.0);
    for (std::size_t i = 0; i < r.values.size(); ++i)
      CHECK(std::abs(big.values[i]) == doctest::Approx(std::abs(r.values[i])).epsilon(1e-12));
  }

  TEST_CASE("window growth never decreases the norm") {
    std::mt19937_64 rng(56);
    const CubeWindow small = CubeWindow::unit(1, 1, 4), large = CubeWindow::unit(1, 0, 4);
    CoefficientField t = random_field(large, 1, rng);
    CoefficientField ts = CoefficientField::zeros(small, 1);
    for (const auto& q : small.all_cubes()) ts.at(q)[0] = t.at(q)[0];
    for (const auto& q : large.level_cubes(0)) t.at(q)[0] = 0.0;
    const SpaceParams sp{0.2, 0.3, 2.0, 2.0, SpaceKind::B};
    CHECK(seq_norm(t, sp, Weighting::none()).value >= seq_norm(ts, sp, Weighting::none()).value * (1.0 - 1e-14));
  }

  TEST_CASE("coefficient fields round trip through JSON") {
    std::mt19937_64 rng(57);
    const CoefficientField t = random_field(CubeWindow::unit(2, 0, 2), 2, rng);
    const CoefficientField back = coefficient_field_from_json(to_json(t));
    CHECK(back.values == t.values);
  }
}
