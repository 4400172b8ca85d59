#include <immintrin.h>

#include <cstddef>

#include "spherepol/kernels.hpp"

namespace spherepol::kernels::avx2 {

namespace {

// 4 rows x 8 columns of C kept in registers across the k loop.
inline void tile_4x8(int k, const double* A, int lda, const double* B, int ldb, double* C,
                     int ldc) {
  __m256d c00 = _mm256_loadu_pd(C), c01 = _mm256_loadu_pd(C + 4);
  __m256d c10 = _mm256_loadu_pd(C + ldc), c11 = _mm256_loadu_pd(C + ldc + 4);
  __m256d c20 = _mm256_loadu_pd(C + 2 * ldc), c21 = _mm256_loadu_pd(C + 2 * ldc + 4);
  __m256d c30 = _mm256_loadu_pd(C + 3 * ldc), c31 = _mm256_loadu_pd(C + 3 * ldc + 4);
  const double* a0 = A;
  const double* a1 = A + lda;
  const double* a2 = A + 2 * std::size_t(lda);
  const double* a3 = A + 3 * std::size_t(lda);
  for (int p = 0; p < k; ++p) {
    const double* b = B + std::size_t(p) * ldb;
    __m256d b0 = _mm256_loadu_pd(b), b1 = _mm256_loadu_pd(b + 4);
    __m256d a = _mm256_broadcast_sd(a0 + p);
    c00 = _mm256_fmadd_pd(a, b0, c00);
    c01 = _mm256_fmadd_pd(a, b1, c01);
    a = _mm256_broadcast_sd(a1 + p);
    c10 = _mm256_fmadd_pd(a, b0, c10);
    c11 = _mm256_fmadd_pd(a, b1, c11);
    a = _mm256_broadcast_sd(a2 + p);
    c20 = _mm256_fmadd_pd(a, b0, c20);
    c21 = _mm256_fmadd_pd(a, b1, c21);
    a = _mm256_broadcast_sd(a3 + p);
    c30 = _mm256_fmadd_pd(a, b0, c30);
    c31 = _mm256_fmadd_pd(a, b1, c31);
  }
  _mm256_storeu_pd(C, c00);
  _mm256_storeu_pd(C + 4, c01);
  _mm256_storeu_pd(C + ldc, c10);
  _mm256_storeu_pd(C + ldc + 4, c11);
  _mm256_storeu_pd(C + 2 * ldc, c20);
  _mm256_storeu_pd(C + 2 * ldc + 4, c21);
  _mm256_storeu_pd(C + 3 * ldc, c30);
  _mm256_storeu_pd(C + 3 * ldc + 4, c31);
}

inline void tile_4x4(int k, const double* A, int lda, const double* B, int ldb, double* C,
                     int ldc) {
  __m256d c0 = _mm256_loadu_pd(C), c1 = _mm256_loadu_pd(C + ldc);
  __m256d c2 = _mm256_loadu_pd(C + 2 * ldc), c3 = _mm256_loadu_pd(C + 3 * ldc);
  for (int p = 0; p < k; ++p) {
    __m256d b = _mm256_loadu_pd(B + std::size_t(p) * ldb);
    c0 = _mm256_fmadd_pd(_mm256_broadcast_sd(A + p), b, c0);
    c1 = _mm256_fmadd_pd(_mm256_broadcast_sd(A + lda + p), b, c1);
    c2 = _mm256_fmadd_pd(_mm256_broadcast_sd(A + 2 * std::size_t(lda) + p), b, c2);
    c3 = _mm256_fmadd_pd(_mm256_broadcast_sd(A + 3 * std::size_t(lda) + p), b, c3);
  }
  _mm256_storeu_pd(C, c0);
  _mm256_storeu_pd(C + ldc, c1);
  _mm256_storeu_pd(C + 2 * ldc, c2);
  _mm256_storeu_pd(C + 3 * ldc, c3);
}

inline void row_block(int n0, int n1, int k, const double* a, const double* B, int ldb,
                      double* c) {
  int j = n0;
  for (; j + 4 <= n1; j += 4) {
    __m256d acc = _mm256_loadu_pd(c + j);
    for (int p = 0; p < k; ++p)
      acc = _mm256_fmadd_pd(_mm256_broadcast_sd(a + p), _mm256_loadu_pd(B + std::size_t(p) * ldb + j), acc);
    _mm256_storeu_pd(c + j, acc);
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
  const int n8 = n - n % 8;
  const int m4 = m - m % 4;
  // column panels outermost so a k x 8 slice of B stays cache resident
  for (int j = 0; j < n8; j += 8)
    for (int i = 0; i < m4; i += 4)
      tile_4x8(k, A + std::size_t(i) * lda, lda, B + j, ldb, C + std::size_t(i) * ldc + j, ldc);
  if (n8 + 4 <= n)
    for (int i = 0; i < m4; i += 4)
      tile_4x4(k, A + std::size_t(i) * lda, lda, B + n8, ldb, C + std::size_t(i) * ldc + n8, ldc);
  const int nv = n8 + ((n8 + 4 <= n) ? 4 : 0);
  for (int i = 0; i < m4; ++i)
    row_block(nv, n, k, A + std::size_t(i) * lda, B, ldb, C + std::size_t(i) * ldc);
  for (int i = m4; i < m; ++i)
    row_block(0, n, k, A + std::size_t(i) * lda, B, ldb, C + std::size_t(i) * ldc);
}

}  // namespace spherepol::kernels::avx2
