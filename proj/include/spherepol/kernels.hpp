#pragma once

#include <string>

namespace spherepol::kernels {

// Instruction-set variants of the dense kernels. The scalar variant is the
// reference; vector variants must match it to rounding.
enum class Isa { Scalar, Avx2, Neon };

const char* to_string(Isa isa);
bool isa_available(Isa isa);

// Variant used by the dispatching entry points. Chosen once at startup: the
// best available, unless SPHEREPOL_SIMD=scalar|avx2|neon overrides it.
Isa active_isa();
// Throws std::invalid_argument if the variant is not available here.
void set_active_isa(Isa isa);

// C[m x n] += A[m x k] * B[k x n], all row-major with the given strides.
void gemm_acc(int m, int n, int k, const double* A, int lda, const double* B, int ldb, double* C,
              int ldc);

namespace scalar {
void gemm_acc(int m, int n, int k, const double* A, int lda, const double* B, int ldb, double* C,
              int ldc);
}
namespace avx2 {
void gemm_acc(int m, int n, int k, const double* A, int lda, const double* B, int ldb, double* C,
              int ldc);
}
namespace neon {
void gemm_acc(int m, int n, int k, const double* A, int lda, const double* B, int ldb, double* C,
              int ldc);
}

}  // namespace spherepol::kernels
