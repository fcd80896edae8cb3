#include "lsqflow/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace lsqflow::kernels {
namespace {

const KernelTable& best() {
  if (const KernelTable* t = avx2_table()) return *t;
  if (const KernelTable* t = neon_table()) return *t;
  return scalar_table();
}

const KernelTable& resolve() {
  const char* env = std::getenv("LSQFLOW_KERNELS");
  const std::string_view want = env ? env : "auto";
  if (want == "scalar") return scalar_table();
  if (want == "avx2" && avx2_table()) return *avx2_table();
  if (want == "neon" && neon_table()) return *neon_table();
  return best();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = resolve();
  return table;
}

}  // namespace lsqflow::kernels
