#include "lsqflow/kernels.hpp"

#include <cmath>

namespace lsqflow::kernels {
namespace {

void affine_gemv(const double* a, const double* x, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = a + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
    y[i] = acc + b[i];
  }
}

void axpy_into(const double* x, const double* k, double alpha, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + alpha * k[i];
}

void rk4_combine(double* u, const double* k1, const double* k2, const double* k3, const double* k4,
                 double h, std::size_t n) {
  const double c = h / 6.0;
  for (std::size_t i = 0; i < n; ++i) u[i] += c * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

bool exceeds(const double* u, double limit, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!(std::abs(u[i]) <= limit)) return true;
  return false;
}

constexpr KernelTable kTable{"scalar", affine_gemv, axpy_into, rk4_combine, exceeds};

}  // namespace

const KernelTable& scalar_table() { return kTable; }

}  // namespace lsqflow::kernels
