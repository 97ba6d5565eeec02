#include "qtube/kernels.hpp"

#if defined(QTUBE_HAVE_AVX2_TU) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace qtube::kernels::avx2 {

namespace {
inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}
}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    acc = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

void spmv(std::ptrdiff_t rows, const int* outer, const int* inner, const double* values,
          const double* x, double* y) {
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    int p = outer[r];
    const int end = outer[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; p + 4 <= end; p += 4) {
      __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(inner + p));
      __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(values + p), xv, acc);
    }
    double s = hsum(acc);
    for (; p < end; ++p) s += values[p] * x[inner[p]];
    y[r] = s;
  }
}

}  // namespace qtube::kernels::avx2

#else

// Non-x86 builds: the avx2 entry points forward to the reference kernels and
// isa_supported(Avx2) reports false, so they are never selected.
namespace qtube::kernels::avx2 {
double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { scalar::axpy(alpha, x, y, n); }
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
  return scalar::weighted_dot(w, a, b, n);
}
void spmv(std::ptrdiff_t rows, const int* outer, const int* inner, const double* values,
          const double* x, double* y) {
  scalar::spmv(rows, outer, inner, values, x, y);
}
}  // namespace qtube::kernels::avx2

#endif
