#include "adcraft/simd/kernels.hpp"

#if defined(ADCRAFT_HAVE_AVX2_TU) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace adcraft::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), yv));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemm_nn(const double* a, const double* b, double* c, std::size_t n,
             std::size_t k, std::size_t m) {
  if (m == 1) {  // matrix-vector
    for (std::size_t i = 0; i < n; ++i) c[i] += dot(a + i * k, b, k);
    return;
  }
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
  if (m == 1) {  // outer product
    for (std::size_t i = 0; i < n; ++i)
      if (a[i] != 0.0) axpy(a[i], b, c + i * k, k);
    return;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < k; ++p)
      c[i * k + p] += dot(a + i * m, b + p * m, m);
}

void gemm_tn(const double* a, const double* b, double* c, std::size_t n,
             std::size_t k, std::size_t m) {
  if (m == 1) {
    for (std::size_t i = 0; i < n; ++i)
      if (b[i] != 0.0) axpy(b[i], a + i * k, c, k);
    return;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip != 0.0) axpy(aip, b + i * m, c + p * m, m);
    }
}

constexpr KernelTable kTable{Isa::kAvx2, dot, axpy, gemm_nn, gemm_nt, gemm_tn};

}  // namespace

const KernelTable* avx2_kernels() { return &kTable; }

}  // namespace adcraft::simd

#else

namespace adcraft::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace adcraft::simd

#endif
