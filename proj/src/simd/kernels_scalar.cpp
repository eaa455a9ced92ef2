#include "adcraft/simd/kernels.hpp"

namespace adcraft::simd {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemm_nn(const double* a, const double* b, double* c, std::size_t n,
             std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = c + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip != 0.0) axpy(aip, b + p * m, crow, m);
    }
  }
}

void gemm_nt(const double* a, const double* b, double* c, std::size_t n,
             std::size_t m, std::size_t k) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < k; ++p)
      c[i * k + p] += dot(a + i * m, b + p * m, m);
}

void gemm_tn(const double* a, const double* b, double* c, std::size_t n,
             std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip != 0.0) axpy(aip, b + i * m, c + p * m, m);
    }
}

constexpr KernelTable kTable{Isa::kScalar, dot, axpy, gemm_nn, gemm_nt, gemm_tn};

}  // namespace

const KernelTable& scalar_kernels() { return kTable; }

}  // namespace adcraft::simd
