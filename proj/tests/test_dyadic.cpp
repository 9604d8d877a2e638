#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "mwt/dyadic.hpp"
#include "mwt/errors.hpp"
#include "mwt/quadrature.hpp"

using namespace mwt;

namespace {

ScalarField random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScalarField f = ScalarField::zeros(g);
  for (auto& v : f.values) v = u(rng);
  return f;
}

}  // namespace

TEST_SUITE("dyadic") {
  TEST_CASE("cube geometry") {
    const Box base = Box::unit(1);
    const DyadicCube q{1, 2, {1}};
    const Box b = cube_box(q, base);
    CHECK(b.lo[0] == 0.25);
    CHECK(b.hi[0] == 0.5);
    const DilatedCube same = dilate(DyadicCube{1, 0, {0}}, 1.0, base, false);
    CHECK(same.box.lo[0] == 0.0);
    CHECK(same.box.hi[0] == 1.0);
    const DilatedCube twice = dilate_pow2(q, 1, base, false);
    CHECK(twice.box.edge() == doctest::Approx(0.5));
    CHECK(twice.box.center()[0] == doctest::Approx(b.center()[0]));
    CHECK_THROWS_AS(dilate_pow2(DyadicCube{1, 1, {0}}, 1, base, false), OutOfDomainError);
    CHECK(dilate_pow2(DyadicCube{1, 1, {0}}, 1, base, true).clipped);
  }

  TEST_CASE("children partition the parent") {
    for (int n = 1; n <= 3; ++n) {
      DyadicCube q{n, 2, {}};
      for (int i = 0; i < n; ++i) q.index[static_cast<std::size_t>(i)] = i + 1;
      const auto kids = children(q);
      CHECK(kids.size() == (std::size_t{1} << n));
      double vol = 0.0;
      for (const auto& c : kids) {
        CHECK(parent(c) == q);
        vol += cube_box(c, Box::unit(n)).volume();
      }
      CHECK(vol == doctest::Approx(cube_box(q, Box::unit(n)).volume()).epsilon(1e-15));
    }
  }

  TEST_CASE("window enumeration is row-major") {
    const CubeWindow w = CubeWindow::unit(2, 0, 3);
    const auto level = w.level_cubes(2);
    REQUIRE(level.size() == 16);
    for (std::size_t i = 0; i < level.size(); ++i) CHECK(w.flat_index(level[i]) == i);
    CHECK(level[1].index[1] == 1);
    CHECK(w.total() == 1 + 4 + 16 + 64);
  }

  TEST_CASE("conditional expectation") {
    std::mt19937_64 rng(31);
    const Grid g{2, 5, Box::unit(2)};
    const ScalarField f = random_field(g, rng), h = random_field(g, rng);
    for (int j = 0; j <= 5; ++j) {
      const ScalarField e = expectation_field(f, j);
      const ScalarField ee = expectation_field(e, j);
      for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(std::abs(ee.values[i] - e.values[i]) < 1e-14);
      const double sf = std::accumulate(f.values.begin(), f.values.end(), 0.0);
      const double se = std::accumulate(e.values.begin(), e.values.end(), 0.0);
      CHECK(std::abs(sf - se) < 1e-12 * sf);
      const ScalarField eh = expectation_field(h, j);
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        a += e.values[i] * h.values[i];
        b += f.values[i] * eh.values[i];
      }
      CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
    }
    CHECK_THROWS_AS(expectation_field(f, 6), ResolutionError);
  }

  TEST_CASE("expectation keeps level-measurable data") {
    const Grid g{1, 4, Box::unit(1)};
    ScalarField f = ScalarField::zeros(g);
    for (std::size_t i = 0; i < 8; ++i) f.values[i] = 1.0;
    const ScalarField e = expectation_field(f, 1);
    CHECK(e.values == f.values);
  }

  TEST_CASE("maximal function") {
    std::mt19937_64 rng(32);
    const Grid g{1, 6, Box::unit(1)};
    ScalarField c = ScalarField::zeros(g);
    for (auto& v : c.values) v = 2.5;
    for (double v : hl_maximal(c).values) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));

    const ScalarField f = random_field(g, rng);
    ScalarField big = f;
    for (auto& v : big.values) v += 0.1;
    const ScalarField mf = hl_maximal(f), mb = hl_maximal(big);
    ScalarField sum = f;
    const ScalarField other = random_field(g, rng);
    for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += other.values[i];
    const ScalarField ms = hl_maximal(sum), mo = hl_maximal(other);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      CHECK(mf.values[i] >= f.values[i]);
      CHECK(mb.values[i] >= mf.values[i]);
      CHECK(ms.values[i] <= mf.values[i] + mo.values[i] + 1e-14);
    }
  }

  TEST_CASE("maximal function of a spike decays like the reaching box") {
    const Grid g{1, 6, Box::unit(1)};
    ScalarField f = ScalarField::zeros(g);
    f.values[0] = static_cast<double>(g.per_axis());  // unit mass
    const ScalarField m = hl_maximal(f);
    // A box of half-width r cells centred at node i reaches the spike once r >= i;
    // the best such box uses the smallest power of two (or zero) with r >= i.
    for (std::size_t i : {std::size_t{3}, std::size_t{9}, std::size_t{20}}) {
      std::size_t r = 1;
      while (r < i) r *= 2;
      const std::size_t lo = i >= r ? i - r : 0, hi = std::min(i + r, g.per_axis() - 1);
      const double expect = f.values[0] / static_cast<double>(hi - lo + 1);
      CHECK(m.values[i] == doctest::Approx(expect).epsilon(1e-14));
    }
  }

  TEST_CASE("graded quadrature integrates a power singularity") {
    const Point s{0.0};
    const QuadratureRule rule = build_rule(Box::cube(1, Point{0.0}, 1.0), {&s, 1}, {});
    std::vector<double> v(rule.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(rule.nodes[i][0], -0.5);
    CHECK(integrate(rule, v, 1e-6).value == doctest::Approx(2.0).epsilon(1e-6));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / rule.nodes[i][0];
    CHECK_THROWS_AS(integrate(rule, v, 1e-6), IntegrabilityError);

    const Point off{0.3};
    const QuadratureRule inner = build_rule(Box::cube(1, Point{0.0}, 1.0), {&off, 1}, {});
    std::vector<double> w(inner.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(std::abs(inner.nodes[i][0] - 0.3), -0.5);
    CHECK(integrate(inner, w, 1e-6).value == doctest::Approx(2.0 * (std::sqrt(0.3) + std::sqrt(0.7))).epsilon(1e-6));
  }
}
