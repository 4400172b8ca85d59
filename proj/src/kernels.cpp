#include "spherepol/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace spherepol::kernels {

namespace {

Isa best_available() {
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa initial_isa() {
  const char* env = std::getenv("SPHEREPOL_SIMD");
  if (env) {
    std::string s(env);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
      if (s == to_string(isa) && isa_available(isa)) return isa;
  }
  return best_available();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(SPHEREPOL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(SPHEREPOL_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return current().load(); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa))
    throw std::invalid_argument(std::string("kernel variant not available: ") + to_string(isa));
  current().store(isa);
}

void gemm_acc(int m, int n, int k, const double* A, int lda, const double* B, int ldb, double* C,
              int ldc) {
  switch (active_isa()) {
#if defined(SPHEREPOL_HAVE_AVX2)
    case Isa::Avx2: avx2::gemm_acc(m, n, k, A, lda, B, ldb, C, ldc); return;
#endif
#if defined(SPHEREPOL_HAVE_NEON)
    case Isa::Neon: neon::gemm_acc(m, n, k, A, lda, B, ldb, C, ldc); return;
#endif
    default: scalar::gemm_acc(m, n, k, A, lda, B, ldb, C, ldc); return;
  }
}

namespace scalar {

void gemm_acc(int m, int n, int k, const double* A, int lda, const double* B, int ldb, double* C,
              int ldc) {
  for (int i = 0; i < m; ++i) {
    double* c = C + std::size_t(i) * ldc;
    const double* a = A + std::size_t(i) * lda;
    for (int p = 0; p < k; ++p) {
      const double ap = a[p];
      const double* b = B + std::size_t(p) * ldb;
      for (int j = 0; j < n; ++j) c[j] += ap * b[j];
    }
  }
}

}  // namespace scalar

#if !defined(SPHEREPOL_HAVE_AVX2)
namespace avx2 {
void gemm_acc(int m, int n, int k, const double* A, int lda, const double* B, int ldb, double* C,
              int ldc) {
  scalar::gemm_acc(m, n, k, A, lda, B, ldb, C, ldc);
}
}  // namespace avx2
#endif

#if !defined(SPHEREPOL_HAVE_NEON)
namespace neon {
void gemm_acc(int m, int n, int k, const double* A, int lda, const double* B, int ldb, double* C,
              int ldc) {
  scalar::gemm_acc(m, n, k, A, lda, B, ldb, C, ldc);
}
}  // namespace neon
#endif

}  // namespace spherepol::kernels
