#include "lsqflow/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

#include <cmath>

namespace lsqflow::kernels {
namespace {

void affine_gemv(const double* a, const double* x, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = a + i * n;
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      acc0 = vfmaq_f64(acc0, vld1q_f64(row + j), vld1q_f64(x + j));
      acc1 = vfmaq_f64(acc1, vld1q_f64(row + j + 2), vld1q_f64(x + j + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; j < n; ++j) acc += row[j] * x[j];
    y[i] = acc + b[i];
  }
}

void axpy_into(const double* x, const double* k, double alpha, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vfmaq_n_f64(vld1q_f64(x + i), vld1q_f64(k + i), alpha));
  for (; i < n; ++i) out[i] = x[i] + alpha * k[i];
}

void rk4_combine(double* u, const double* k1, const double* k2, const double* k3, const double* k4,
                 double h, std::size_t n) {
  const double c = h / 6.0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t s = vaddq_f64(vld1q_f64(k1 + i), vld1q_f64(k4 + i));
    s = vfmaq_n_f64(s, vaddq_f64(vld1q_f64(k2 + i), vld1q_f64(k3 + i)), 2.0);
    vst1q_f64(u + i, vfmaq_n_f64(vld1q_f64(u + i), s, c));
  }
  for (; i < n; ++i) u[i] += c * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

bool exceeds(const double* u, double limit, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!(std::abs(u[i]) <= limit)) return true;
  return false;
}

constexpr KernelTable kTable{"neon", affine_gemv, axpy_into, rk4_combine, exceeds};

}  // namespace

const KernelTable* neon_table() { return &kTable; }

}  // namespace lsqflow::kernels

#else

namespace lsqflow::kernels {
const KernelTable* neon_table() { return nullptr; }
}  // namespace lsqflow::kernels

#endif
