#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "mwt/simd.hpp"

using namespace mwt::simd;

namespace {

// Odd length so every vector kernel also runs its remainder loop.
constexpr std::size_t kLen = 37;

std::vector<double> random_values(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(kLen);
  for (auto& x : v) x = u(rng);
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar backend is always available") {
    const auto backends = available_backends();
    REQUIRE_FALSE(backends.empty());
    CHECK(backends.front() == Backend::scalar);
    const bool avx2 = avx2_kernels() != nullptr && cpu_has_avx2();
    CHECK(backends.size() == (avx2 ? 2u : 1u));
  }

  TEST_CASE("every backend matches the scalar reference bit for bit") {
    const KernelTable& ref = scalar_kernels();
    for (Backend b : available_backends()) {
      CAPTURE(backend_name(b));
      const KernelTable& k = kernels_for(b);
      std::mt19937_64 rng(21);
      for (int trial = 0; trial < 20; ++trial) {
        const auto v = random_values(rng, -3.0, 3.0);
        const auto upper = random_values(rng, 0.0, 5.0), lower = random_values(rng, 0.0, 5.0);
        std::vector<std::complex<double>> z(kLen);
        for (std::size_t i = 0; i < kLen; ++i) z[i] = {v[i], upper[i] - 2.5};

        auto za = z, zb = z;
        ref.spectral_scale(za.data(), upper.data(), kLen);
        k.spectral_scale(zb.data(), upper.data(), kLen);
        CHECK(std::memcmp(za.data(), zb.data(), kLen * sizeof(za[0])) == 0);

        auto oa = random_values(rng, 0.0, 1.0), ob = oa;
        ref.box_max_update(oa.data(), upper.data(), lower.data(), 0.7, kLen);
        k.box_max_update(ob.data(), upper.data(), lower.data(), 0.7, kLen);
        CHECK(same_bits(oa, ob));

        for (double q : {1.0, 2.0, 0.5, 3.5}) {
          std::vector<double> aa(kLen, 0.25), ab(kLen, 0.25);
          ref.accumulate_pow(aa.data(), v.data(), q, kLen);
          k.accumulate_pow(ab.data(), v.data(), q, kLen);
          CHECK(same_bits(aa, ab));
        }

        std::vector<double> ma(kLen, 1.0), mb(kLen, 1.0);
        ref.accumulate_max(ma.data(), v.data(), kLen);
        k.accumulate_max(mb.data(), v.data(), kLen);
        CHECK(same_bits(ma, mb));

        std::vector<double> ca(kLen), cb(kLen);
        ref.complex_abs(ca.data(), z.data(), kLen);
        k.complex_abs(cb.data(), z.data(), kLen);
        CHECK(same_bits(ca, cb));

        CHECK(same_bits(ref.max_abs(v.data(), kLen), k.max_abs(v.data(), kLen)));
        CHECK(same_bits(ref.sum(v.data(), kLen), k.sum(v.data(), kLen)));
        for (std::size_t len : {std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{9}}) {
          CHECK(same_bits(ref.sum(v.data(), len), k.sum(v.data(), len)));
          CHECK(same_bits(ref.max_abs(v.data(), len), k.max_abs(v.data(), len)));
        }
      }
    }
  }

  TEST_CASE("scalar reference values") {
    const double v[] = {1.0, -2.0, 3.0, -4.5, 0.5};
    CHECK(scalar_kernels().sum(v, 5) == doctest::Approx(-2.0));
    CHECK(scalar_kernels().max_abs(v, 5) == 4.5);
    std::complex<double> z[] = {{3.0, 4.0}};
    double out[1];
    scalar_kernels().complex_abs(out, z, 1);
    CHECK(out[0] == 5.0);
  }
}
