#include <cstdlib>
#include <string>

#include "mwt/errors.hpp"
#include "mwt/simd.hpp"

namespace mwt::simd {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::scalar};
  if (cpu_has_avx2()) out.push_back(Backend::avx2);
  return out;
}

const KernelTable& kernels_for(Backend b) {
  if (b == Backend::avx2) {
    if (!cpu_has_avx2()) throw InvalidArgumentError("AVX2 backend is not available on this CPU");
    return *avx2_kernels();
  }
  return scalar_kernels();
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

namespace {

const KernelTable& select() {
  const char* env = std::getenv("MWT_SIMD");
  const std::string want = env ? env : "auto";
  if (want == "scalar") return scalar_kernels();
  if (want == "avx2") return kernels_for(Backend::avx2);
  return cpu_has_avx2() ? *avx2_kernels() : scalar_kernels();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace mwt::simd
