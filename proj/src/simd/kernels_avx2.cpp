// Built with -mavx2; nothing here may run before cpu_has_avx2() says so.

#include <cmath>

#include "mwt/simd.hpp"

#if defined(MWT_HAVE_AVX2_TU) && defined(__AVX2__)
#include <immintrin.h>

namespace mwt::simd {

namespace {

void spectral_scale(std::complex<double>* data, const double* mult, std::size_t n) {
  auto* d = reinterpret_cast<double*>(data);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // [m0 m0 m1 m1] against [re0 im0 re1 im1]
    const __m128d m2 = _mm_loadu_pd(mult + i);
    const __m256d m = _mm256_permute4x64_pd(_mm256_castpd128_pd256(m2), 0b01010000);
    const __m256d z = _mm256_loadu_pd(d + 2 * i);
    _mm256_storeu_pd(d + 2 * i, _mm256_mul_pd(z, m));
  }
  for (; i < n; ++i) data[i] = {data[i].real() * mult[i], data[i].imag() * mult[i]};
}

void box_max_update(double* out, const double* upper, const double* lower, double scale,
                    std::size_t n) {
  const __m256d s = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(upper + i), _mm256_loadu_pd(lower + i)), s);
    const __m256d o = _mm256_loadu_pd(out + i);
    _mm256_storeu_pd(out + i, _mm256_max_pd(v, o));
  }
  for (; i < n; ++i) {
    const double v = (upper[i] - lower[i]) * scale;
    out[i] = out[i] < v ? v : out[i];
  }
}

inline __m256d abs_pd(__m256d x) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

void accumulate_pow(double* acc, const double* v, double q, std::size_t n) {
  std::size_t i = 0;
  if (q == 1.0) {
    for (; i + 4 <= n; i += 4)
      _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), abs_pd(_mm256_loadu_pd(v + i))));
    for (; i < n; ++i) acc[i] += std::fabs(v[i]);
  } else if (q == 2.0) {
    for (; i + 4 <= n; i += 4) {
      const __m256d x = _mm256_loadu_pd(v + i);
      _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(x, x)));
    }
    for (; i < n; ++i) acc[i] += v[i] * v[i];
  } else {
    for (; i < n; ++i) acc[i] += std::pow(std::fabs(v[i]), q);
  }
}

void accumulate_max(double* acc, const double* v, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(acc + i, _mm256_max_pd(abs_pd(_mm256_loadu_pd(v + i)), _mm256_loadu_pd(acc + i)));
  for (; i < n; ++i) {
    const double a = std::fabs(v[i]);
    acc[i] = acc[i] < a ? a : acc[i];
  }
}

void complex_abs(double* out, const std::complex<double>* z, std::size_t n) {
  const auto* d = reinterpret_cast<const double*>(z);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(d + 2 * i);      // re0 im0 re1 im1
    const __m256d b = _mm256_loadu_pd(d + 2 * i + 4);  // re2 im2 re3 im3
    const __m256d sa = _mm256_mul_pd(a, a);
    const __m256d sb = _mm256_mul_pd(b, b);
    // hadd gives [sa0+sa1, sb0+sb1, sa2+sa3, sb2+sb3] = [|z0|^2, |z2|^2, |z1|^2, |z3|^2]
    const __m256d h = _mm256_hadd_pd(sa, sb);
    const __m256d ordered = _mm256_permute4x64_pd(h, 0b11011000);
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(ordered));
  }
  for (; i < n; ++i) out[i] = std::sqrt(z[i].real() * z[i].real() + z[i].imag() * z[i].imag());
}

double max_abs(const double* v, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(abs_pd(_mm256_loadu_pd(v + i)), m);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = 0.0;
  for (double l : lanes) r = r < l ? l : r;
  for (; i < n; ++i) {
    const double a = std::fabs(v[i]);
    r = r < a ? a : r;
  }
  return r;
}

double sum(const double* v, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) s = _mm256_add_pd(s, _mm256_loadu_pd(v + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, s);
  for (std::size_t l = 0; i < n; ++i, ++l) lanes[l] += v[i];
  return (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
}

constexpr KernelTable kTable{Backend::avx2,  spectral_scale, box_max_update, accumulate_pow,
                             accumulate_max, complex_abs,    max_abs,        sum};

}  // namespace

const KernelTable* avx2_kernels() { return &kTable; }

}  // namespace mwt::simd

#else

namespace mwt::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace mwt::simd

#endif
