#pragma once

#include <cstddef>
#include <string_view>

namespace lsqflow::kernels {

// Row-major dense kernels used by the time steppers. Every variant must agree
// with the scalar reference within a few ulps per accumulated term.
struct KernelTable {
  std::string_view name;
  // y = A x + b, A is n x n row-major.
  void (*affine_gemv)(const double* a, const double* x, const double* b, double* y, std::size_t n);
  // out = x + alpha * k
  void (*axpy_into)(const double* x, const double* k, double alpha, double* out, std::size_t n);
  // u += h/6 (k1 + 2 k2 + 2 k3 + k4)
  void (*rk4_combine)(double* u, const double* k1, const double* k2, const double* k3,
                      const double* k4, double h, std::size_t n);
  // true if any |u_i| > limit or u_i is not finite
  bool (*exceeds)(const double* u, double limit, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the variant is not compiled in or not supported by the CPU.
const KernelTable* avx2_table();
const KernelTable* neon_table();

// Picks the table named by LSQFLOW_KERNELS (scalar|avx2|neon|auto), falling
// back to the best supported variant. Resolved once per process.
const KernelTable& active();

}  // namespace lsqflow::kernels
