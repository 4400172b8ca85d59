#include <arm_neon.h>

#include <cstddef>

#include "spherepol/kernels.hpp"

namespace spherepol::kernels::neon {

namespace {

// 4 rows x 4 columns of C in eight 2-lane registers.
inline void tile_4x4(int k, const double* A, int lda, const double* B, int ldb, double* C,
                     int ldc) {
  float64x2_t c[4][2];
  for (int r = 0; r < 4; ++r) {
    c[r][0] = vld1q_f64(C + std::size_t(r) * ldc);
    c[r][1] = vld1q_f64(C + std::size_t(r) * ldc + 2);
  }
  for (int p = 0; p < k; ++p) {
    const double* b = B + std::size_t(p) * ldb;
    float64x2_t b0 = vld1q_f64(b), b1 = vld1q_f64(b + 2);
    for (int r = 0; r < 4; ++r) {
      float64x2_t a = vdupq_n_f64(A[std::size_t(r) * lda + p]);
      c[r][0] = vfmaq_f64(c[r][0], a, b0);
      c[r][1] = vfmaq_f64(c[r][1], a, b1);
    }
  }
  for (int r = 0; r < 4; ++r) {
    vst1q_f64(C + std::size_t(r) * ldc, c[r][0]);
    vst1q_f64(C + std::size_t(r) * ldc + 2, c[r][1]);
  }
}

inline void row_block(int n0, int n1, int k, const double* a, const double* B, int ldb,
                      double* c) {
  int j = n0;
  for (; j + 2 <= n1; j += 2) {
    float64x2_t acc = vld1q_f64(c + j);
    for (int p = 0; p < k; ++p)
      acc = vfmaq_f64(acc, vdupq_n_f64(a[p]), vld1q_f64(B + std::size_t(p) * ldb + j));
    vst1q_f64(c + j, acc);
  }
  for (; j < n1; ++j) {
    double acc = c[j];
    for (int p = 0; p < k; ++p) acc += a[p] * B[std::size_t(p) * ldb + j];
    c[j] = acc;
  }
}

}  // namespace

void gemm_acc(int m, int n, int k, const double* A, int lda, const double* B, int ldb, double* C,
              int ldc) {
  const int n4 = n - n % 4;
  const int m4 = m - m % 4;
  for (int j = 0; j < n4; j += 4)
    for (int i = 0; i < m4; i += 4)
      tile_4x4(k, A + std::size_t(i) * lda, lda, B + j, ldb, C + std::size_t(i) * ldc + j, ldc);
  for (int i = 0; i < m4; ++i)
    row_block(n4, n, k, A + std::size_t(i) * lda, B, ldb, C + std::size_t(i) * ldc);
  for (int i = m4; i < m; ++i)
    row_block(0, n, k, A + std::size_t(i) * lda, B, ldb, C + std::size_t(i) * ldc);
}

}  // namespace spherepol::kernels::neon
