#pragma once

// Dense double-precision kernels behind the tensor engine.
//
// Every kernel exists as a portable scalar reference and, where the CPU
// supports it, an AVX2+FMA variant. The active table is chosen once at first
// use from the running CPU; set ADCRAFT_SIMD=scalar to force the reference
// path. Vector variants may differ from the reference in the last bits
// (different summation order) but are deterministic on one machine.

#include <cstddef>
#include <string_view>

namespace adcraft::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // c[n,m] += a[n,k] * b[k,m]
  void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t n,
                  std::size_t k, std::size_t m);
  // c[n,k] += a[n,m] * b[k,m]^T
  void (*gemm_nt)(const double* a, const double* b, double* c, std::size_t n,
                  std::size_t m, std::size_t k);
  // c[k,m] += a[n,k]^T * b[n,m]
  void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t n,
                  std::size_t k, std::size_t m);
};

const KernelTable& scalar_kernels();

// Null when the translation unit was built without AVX2 support.
const KernelTable* avx2_kernels();

bool isa_supported(Isa isa);

// Table selected for this process.
const KernelTable& active();

}  // namespace adcraft::simd
