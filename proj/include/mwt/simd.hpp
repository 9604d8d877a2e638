#pragma once

// Data-parallel inner loops. Each kernel has a portable scalar reference and,
// on x86-64, an AVX2 variant chosen at runtime. Reductions in the scalar
// reference use the same four-lane accumulation order as the vector code, so
// every backend returns bit-identical results.
//
// Set MWT_SIMD=scalar (or avx2) in the environment to force a backend.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mwt::simd {

enum class Backend { scalar, avx2 };

struct KernelTable {
  Backend backend;
  // data[i] *= mult[i]
  void (*spectral_scale)(std::complex<double>* data, const double* mult, std::size_t n);
  // out[i] = max(out[i], (upper[i] - lower[i]) * scale)
  void (*box_max_update)(double* out, const double* upper, const double* lower, double scale,
                         std::size_t n);
  // acc[i] += |v[i]|^q ; q == 1 and q == 2 take a vector path
  void (*accumulate_pow)(double* acc, const double* v, double q, std::size_t n);
  // acc[i] = max(acc[i], |v[i]|)
  void (*accumulate_max)(double* acc, const double* v, std::size_t n);
  // out[i] = |z[i]|, computed as sqrt(re^2 + im^2)
  void (*complex_abs)(double* out, const std::complex<double>* z, std::size_t n);
  double (*max_abs)(const double* v, std::size_t n);
  double (*sum)(const double* v, std::size_t n);
};

const KernelTable& scalar_kernels();
/// Null when the AVX2 translation unit was not built.
const KernelTable* avx2_kernels();

bool cpu_has_avx2();
std::vector<Backend> available_backends();
const KernelTable& kernels_for(Backend b);

/// The dispatch-selected table (cached after the first call).
const KernelTable& active();
std::string_view backend_name(Backend b);

inline void spectral_scale(std::span<std::complex<double>> data, std::span<const double> mult) {
  active().spectral_scale(data.data(), mult.data(), data.size());
}
inline void box_max_update(std::span<double> out, std::span<const double> upper,
                           std::span<const double> lower, double scale) {
  active().box_max_update(out.data(), upper.data(), lower.data(), scale, out.size());
}
inline void accumulate_pow(std::span<double> acc, std::span<const double> v, double q) {
  active().accumulate_pow(acc.data(), v.data(), q, acc.size());
}
inline void accumulate_max(std::span<double> acc, std::span<const double> v) {
  active().accumulate_max(acc.data(), v.data(), acc.size());
}
inline void complex_abs(std::span<double> out, std::span<const std::complex<double>> z) {
  active().complex_abs(out.data(), z.data(), out.size());
}
inline double max_abs(std::span<const double> v) { return active().max_abs(v.data(), v.size()); }
inline double sum(std::span<const double> v) { return active().sum(v.data(), v.size()); }

}  // namespace mwt::simd
