#include "lsqflow/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#include <cmath>

namespace lsqflow::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void affine_gemv(const double* a, const double* x, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = a + i * n;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j), acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j + 4), _mm256_loadu_pd(x + j + 4), acc1);
    }
    for (; j + 4 <= n; j += 4)
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; j < n; ++j) acc += row[j] * x[j];
    y[i] = acc + b[i];
  }
}

void axpy_into(const double* x, const double* k, double alpha, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(k + i), _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = x[i] + alpha * k[i];
}

void rk4_combine(double* u, const double* k1, const double* k2, const double* k3, const double* k4,
                 double h, std::size_t n) {
  const double c = h / 6.0;
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s = _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_loadu_pd(k4 + i));
    s = _mm256_fmadd_pd(two, _mm256_add_pd(_mm256_loadu_pd(k2 + i), _mm256_loadu_pd(k3 + i)), s);
    _mm256_storeu_pd(u + i, _mm256_fmadd_pd(vc, s, _mm256_loadu_pd(u + i)));
  }
  for (; i < n; ++i) u[i] += c * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

bool exceeds(const double* u, double limit, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d lim = _mm256_set1_pd(limit);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mag = _mm256_andnot_pd(sign, _mm256_loadu_pd(u + i));
    // NaN compares unordered, so NLE catches it together with overflow.
    if (_mm256_movemask_pd(_mm256_cmp_pd(mag, lim, _CMP_NLE_UQ)) != 0) return true;
  }
  for (; i < n; ++i)
    if (!(std::abs(u[i]) <= limit)) return true;
  return false;
}

constexpr KernelTable kTable{"avx2", affine_gemv, axpy_into, rk4_combine, exceeds};

}  // namespace

const KernelTable* avx2_table() {
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &kTable : nullptr;
}

}  // namespace lsqflow::kernels

#else

namespace lsqflow::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace lsqflow::kernels

#endif
