#include <algorithm>
#include <cmath>

#include "mwt/simd.hpp"

namespace mwt::simd {

namespace {

void spectral_scale(std::complex<double>* data, const double* mult, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) data[i] = {data[i].real() * mult[i], data[i].imag() * mult[i]};
}

void box_max_update(double* out, const double* upper, const double* lower, double scale,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double v = (upper[i] - lower[i]) * scale;
    out[i] = out[i] < v ? v : out[i];
  }
}

void accumulate_pow(double* acc, const double* v, double q, std::size_t n) {
  if (q == 1.0) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += std::fabs(v[i]);
  } else if (q == 2.0) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += v[i] * v[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) acc[i] += std::pow(std::fabs(v[i]), q);
  }
}

void accumulate_max(double* acc, const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs(v[i]);
    acc[i] = acc[i] < a ? a : acc[i];
  }
}

void complex_abs(double* out, const std::complex<double>* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::sqrt(z[i].real() * z[i].real() + z[i].imag() * z[i].imag());
}

double max_abs(const double* v, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(v[i]));
  return m;
}

// Four interleaved partial sums, combined as (s0 + s2) + (s1 + s3); the AVX2
// kernel keeps one lane per partial sum and folds them in the same order.
double sum(const double* v, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int l = 0; l < 4; ++l) s[l] += v[i + static_cast<std::size_t>(l)];
  for (std::size_t l = 0; i < n; ++i, ++l) s[l] += v[i];
  return (s[0] + s[2]) + (s[1] + s[3]);
}

constexpr KernelTable kTable{Backend::scalar, spectral_scale, box_max_update, accumulate_pow,
                             accumulate_max,  complex_abs,    max_abs,        sum};

}  // namespace

const KernelTable& scalar_kernels() { return kTable; }

}  // namespace mwt::simd
