#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mwt/errors.hpp"
#include "mwt/transform.hpp"

using namespace mwt;

namespace {

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) e = std::max(e, std::abs(a.values[i] - b.values[i]));
  return e;
}

double max_abs(const GridFunction& a) {
  double e = 0.0;
  for (const cplx& v : a.values) e = std::max(e, std::abs(v));
  return e;
}

GridFunction exponential(const Grid& g, int k) {
  GridFunction f = GridFunction::zeros(g, 1, true);
  for (std::size_t i = 0; i < g.size(); ++i)
    f.values[i] = std::polar(1.0, 2.0 * std::numbers::pi * k * g.corner(i)[0]);
  return f;
}

}  // namespace

TEST_SUITE("transform") {
  TEST_CASE("filter pair identities") {
    const FilterPair f = build_filters({1, 12, 4, 2, -1});
    CHECK(partition_error(f) <= 1e-12);
    CHECK(lower_bound(f) > 0.0);
    for (double xi : {0.1, 0.49, 2.01, 7.0}) {
      CHECK(phi_hat(xi, 4) == 0.0);
      CHECK(psi_hat(xi, 4) == 0.0);
    }
    CHECK(phi_hat(1.0, 4) == 1.0);
    CHECK_THROWS_AS(build_filters({1, 1, 4, 2, -1}), ResolutionError);
  }

  TEST_CASE("a pure mode is scaled by the filter value") {
    const FilterPair f = build_filters({1, 10, 4, 2, -1});
    for (int k : {3, 17, 40}) {
      const GridFunction e = exponential(f.grid(), k);
      for (int j = f.j_min; j <= f.j_max; ++j) {
        const double m = phi_hat(std::ldexp(2.0 * std::numbers::pi * k, -j), 4);
        const GridFunction out = convolve_scale(e, f, j);
        double err = 0.0;
        for (std::size_t i = 0; i < e.values.size(); ++i) err = std::max(err, std::abs(out.values[i] - m * e.values[i]));
        CHECK(err <= 1e-12);
      }
    }
  }

  TEST_CASE("analysis is linear and reconstruction is exact") {
    const FilterPair f = build_filters({1, 10, 4, 2, -1});
    std::mt19937_64 rng(61);
    const GridFunction a = random_band_limited(f, 2, rng), b = random_band_limited(f, 2, rng);
    GridFunction sum = a;
    for (std::size_t i = 0; i < a.values.size(); ++i) sum.values[i] += b.values[i];
    const CoefficientField ta = analyze(a, f), tb = analyze(b, f), ts = analyze(sum, f);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < ts.values.size(); ++i) {
      err = std::max(err, std::abs(ts.values[i] - ta.values[i] - tb.values[i]));
      scale = std::max(scale, std::abs(ts.values[i]));
    }
    CHECK(err <= 1e-12 * scale);
    CHECK(max_abs_diff(synthesize(ta, f), a) <= 1e-8 * max_abs(a));

    const CoefficientField zero = CoefficientField::zeros(f.window(), 2);
    CHECK(max_abs(synthesize(zero, f)) == 0.0);
    for (const cplx& v : analyze(GridFunction::zeros(f.grid(), 2, true), f).values) CHECK(v == cplx(0.0));
  }

  TEST_CASE("changing the filters off the support leaves the output unchanged") {
    FilterPair f = build_filters({1, 10, 4, 2, -1});
    const GridFunction e = exponential(f.grid(), 5);
    const GridFunction before = convolve_scale(e, f, 3);
    const auto norms = f.frequency_norms();
    for (std::size_t i = 0; i < norms.size(); ++i)
      if (std::abs(norms[i] - 2.0 * std::numbers::pi * 5) > 1e-9) f.phi[1][i] += 1.0;
    CHECK(max_abs_diff(convolve_scale(e, f, 3), before) <= 1e-12);
  }

  TEST_CASE("lifting") {
    const FilterPair f = build_filters({1, 10, 4, 2, -1});
    std::mt19937_64 rng(62);
    const GridFunction g = random_band_limited(f, 1, rng);
    CHECK(max_abs_diff(lifting(g, 0.0), g) <= 1e-12 * max_abs(g));
    CHECK(max_abs_diff(lifting(lifting(g, 0.7), -0.7), g) <= 1e-10 * max_abs(g));
    GridFunction shifted = g;
    for (auto& v : shifted.values) v += 1.0;
    CHECK_THROWS_AS(lifting(shifted, 0.5), PreconditionError);
  }

  TEST_CASE("unweighted and identity-weighted function norms agree") {
    const FilterPair f = build_filters({1, 9, 4, 2, -1});
    std::mt19937_64 rng(63);
    const GridFunction g = random_band_limited(f, 2, rng);
    const MatrixWeight id = MatrixWeight::identity(1, 2).with_domain(Box::unit(1));
    const ReducingFamily fam = ReducingFamily::identity(f.window(), 2, 2.0);
    const SpaceParams sp{0.5, 0.0, 2.0, 2.0, SpaceKind::F};
    const double a = function_norm(g, f, sp, Weighting::none()).value;
    CHECK(function_norm(g, f, sp, Weighting::by_weight(id, 2.0)).value == doctest::Approx(a).epsilon(1e-13));
    CHECK(function_norm(g, f, sp, Weighting::by_family(fam)).value == doctest::Approx(a).epsilon(1e-13));
    CHECK(function_norm(GridFunction::zeros(f.grid(), 2, true), f, sp, Weighting::none()).value == 0.0);
    const CoefficientField sup = peetre_sup(g, f, fam);
    CHECK(seq_norm(sup, sp, Weighting::none()).value >= seq_norm(analyze(g, f), sp, Weighting::by_family(fam)).value);
  }

  TEST_CASE("Schwartz seminorm") {
    SpectralSamples s;
    s.n = 1;
    s.bits = 10;
    s.period = 512.0;
    s.hat.resize(1024);
    for (std::size_t i = 0; i < s.hat.size(); ++i) {
      const double k = i < 512 ? static_cast<double>(i) : static_cast<double>(i) - 1024.0;
      const double xi = 2.0 * std::numbers::pi * k / s.period;
      s.hat[i] = std::exp(-0.5 * xi * xi);
    }
    // Direct grid maximum of g(x) (1 + |x|) with g the inverse transform e^{-x^2/2} / sqrt(2 pi).
    const double h = s.period / 1024.0;
    double direct = 0.0;
    for (int k = -512; k < 512; ++k) {
      const double x = h * k;
      direct = std::max(direct, std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi) * (1.0 + std::abs(x)));
    }
    // The Gaussian spectrum is cut at the Nyquist mode, where it is still about 3e-9.
    CHECK(schwartz_seminorm(s, 0) == doctest::Approx(direct).epsilon(1e-8));

    const FilterPair f = build_filters({1, 10, 4, 2, -1});
    const SpectralSamples phi = filter_spectrum(f, false);
    double prev = 0.0;
    for (int m = 0; m <= 3; ++m) {
      const double v = schwartz_seminorm(phi, m);
      CHECK(v >= prev);
      prev = v;
    }
  }

  TEST_CASE("resampling keeps band-limited data") {
    const FilterPair f = build_filters({1, 9, 4, 2, -1});
    std::mt19937_64 rng(64);
    const GridFunction g = random_band_limited(f, 1, rng);
    const GridFunction up = resample(g, 10);
    CHECK(up.grid.bits == 10);
    CHECK(max_abs_diff(resample(up, 9), g) <= 1e-12 * max_abs(g));
  }
}
