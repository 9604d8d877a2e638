#include <doctest.h>

#include <cmath>

#include "mwt/apdim.hpp"

using namespace mwt;

TEST_SUITE("apdim") {
  TEST_CASE("identity weight has dimension zero") {
    const MatrixWeight id = MatrixWeight::identity(1, 1);
    ApdimConfig cfg;
    cfg.i_max = 4;
    const DimensionReport r = estimate_dimensions(id, 2.0, cfg);
    for (double a : r.primal.seq.a) CHECK(a == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.dims.d == 0.0);
    CHECK(r.dims.dtilde == 0.0);
    CHECK(r.dims.delta == 0.0);
  }

  TEST_CASE("reducing route tracks the direct route") {
    const MatrixWeight w = MatrixWeight::power_log(1, 1, -0.5, 0.0);
    const BaseFamily fam = base_family(w.singular_points(), w.domain(), 6, 7, 5);
    const ASequence direct = a_sequence(w, 2.0, fam, ARoute::direct, {});
    const ASequence reducing = a_sequence(w, 2.0, fam, ARoute::reducing, {});
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < direct.a.size(); ++i) {
      const double r = direct.a[i] / reducing.a[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(hi / lo < 4.0);
  }

  TEST_CASE("admissible M thresholds") {
    CHECK(admissible_M(0.0, 0.0, 2.0, ApDimensions::make(0, 0, 2.0), 1, MVariant::embedding) == 1);
    const ApDimensions dims = ApDimensions::make(0.4, 0.3, 2.0);
    CHECK(dims.delta == doctest::Approx(0.35));
    CHECK(admissible_M(0.0, 0.0, 2.0, dims, 1, MVariant::embedding) == 1);
    CHECK(admissible_M(1.0, 0.0, 2.0, ApDimensions::make(0, 0, 2.0), 1, MVariant::lifting) == 2);
  }

  TEST_CASE("doubling exponent of the identity is the space dimension") {
    for (int n = 1; n <= 2; ++n) {
      const MatrixWeight id = MatrixWeight::identity(n, 1);
      const CubeWindow win = CubeWindow::make(n, 1, 3, id.domain());
      CHECK(doubling_exponent(id, 2.0, win, 8, {}).beta == doctest::Approx(n).epsilon(1e-12));
    }
  }

  TEST_CASE("doubling exponents of power weights") {
    const MatrixWeight neg = MatrixWeight::power_log(1, 1, -0.5, 0.0);
    const MatrixWeight pos = MatrixWeight::power_log(1, 1, 0.5, 0.0);
    const CubeWindow win = CubeWindow::make(1, 1, 6, neg.domain());
    const double bn = doubling_exponent(neg, 2.0, win, 8, {}).beta;
    const double bp = doubling_exponent(pos, 2.0, win, 8, {}).beta;
    CHECK(bn >= 1.0 - 1e-9);
    CHECK(bn <= 1.6);
    CHECK(bp <= 1.5 + 1e-6);
  }

  TEST_CASE("reverse Hoelder probe") {
    const MatrixWeight id = MatrixWeight::identity(1, 1);
    const CubeWindow win = CubeWindow::make(1, 0, 3, id.domain());
    const ReverseHolderResult r = reverse_holder_probe(id, 2.0, win, {1.25, 1.5, 2.0}, 8.0, {});
    for (const auto& row : r.rows) CHECK(row.ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.r_hat == 2.0);

    const MatrixWeight w = MatrixWeight::power_log(1, 1, -0.5, 0.0);
    const CubeWindow wwin = CubeWindow::make(1, 0, 5, w.domain());
    const ReverseHolderResult s =
        reverse_holder_probe(w, 1.0, wwin, {1.1, 1.25, 1.5, 1.75, 1.9, 2.0}, 8.0, {});
    CHECK(s.r_hat >= 1.5);
    CHECK(s.r_hat < 2.0);
  }

  TEST_CASE("growth envelope of the identity family") {
    const CubeWindow win = CubeWindow::make(1, 0, 3, default_domain(1));
    const ReducingFamily fam = ReducingFamily::identity(win, 1, 2.0);
    CHECK(growth_envelope_check(fam, ApDimensions::make(0, 0, 2.0)).max_ratio <= 1.0 + 1e-12);
  }

  TEST_CASE("base family cubes fit after dilation") {
    const MatrixWeight w = MatrixWeight::power_log(1, 1, -0.5, 0.0);
    const BaseFamily fam = base_family(w.singular_points(), w.domain(), 9, 10, 8);
    CHECK_FALSE(fam.cubes.empty());
    for (const auto& q : fam.cubes) CHECK(dilate_pow2(q, 8, fam.domain, true).clipped == false);
  }
}
