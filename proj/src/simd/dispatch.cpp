#include <cstdlib>
#include <string_view>

#include "adcraft/simd/kernels.hpp"

namespace adcraft::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(__i386__)
      if (avx2_kernels() == nullptr) return false;
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

namespace {

const KernelTable& select() {
  if (const char* forced = std::getenv("ADCRAFT_SIMD")) {
    if (std::string_view(forced) == "scalar") return scalar_kernels();
  }
  if (isa_supported(Isa::kAvx2)) return *avx2_kernels();
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace adcraft::simd
