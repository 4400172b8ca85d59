#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "spherepol/kernels.hpp"

using namespace spherepol;

namespace {

struct IsaGuard {
  kernels::Isa saved = kernels::active_isa();
  ~IsaGuard() { kernels::set_active_isa(saved); }
};

}  // namespace

TEST_CASE("vector kernels match the scalar reference") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  const int shapes[][3] = {{1, 1, 1}, {4, 8, 5}, {36, 17, 36}, {7, 3, 9}, {441, 29, 441}, {9, 12, 4}};
  for (kernels::Isa isa : {kernels::Isa::Avx2, kernels::Isa::Neon}) {
    if (!kernels::isa_available(isa)) continue;
    for (auto [m, n, k] : shapes) {
      const int lda = k + 1, ldb = n + 3, ldc = n + 2;
      std::vector<double> A(std::size_t(m) * lda), B(std::size_t(k) * ldb), C(std::size_t(m) * ldc);
      for (double& v : A) v = U(rng);
      for (double& v : B) v = U(rng);
      for (double& v : C) v = U(rng);
      std::vector<double> ref = C, got = C;
      kernels::scalar::gemm_acc(m, n, k, A.data(), lda, B.data(), ldb, ref.data(), ldc);
      if (isa == kernels::Isa::Avx2)
        kernels::avx2::gemm_acc(m, n, k, A.data(), lda, B.data(), ldb, got.data(), ldc);
      else
        kernels::neon::gemm_acc(m, n, k, A.data(), lda, B.data(), ldb, got.data(), ldc);
      double worst = 0;
      for (std::size_t t = 0; t < ref.size(); ++t) worst = std::max(worst, std::abs(ref[t] - got[t]));
      CHECK(worst <= 1e-13 * std::max(1.0, double(k)));
    }
  }
}

TEST_CASE("scalar reference computes a small product exactly") {
  double A[] = {1, 2, 3, 4}, B[] = {5, 6, 7, 8}, C[] = {1, 1, 1, 1};
  kernels::scalar::gemm_acc(2, 2, 2, A, 2, B, 2, C, 2);
  CHECK(C[0] == 20);
  CHECK(C[1] == 23);
  CHECK(C[2] == 44);
  CHECK(C[3] == 51);
}

TEST_CASE("dispatch can be forced to the scalar variant") {
  IsaGuard guard;
  kernels::set_active_isa(kernels::Isa::Scalar);
  CHECK(kernels::active_isa() == kernels::Isa::Scalar);
  double A[] = {2}, B[] = {3}, C[] = {1};
  kernels::gemm_acc(1, 1, 1, A, 1, B, 1, C, 1);
  CHECK(C[0] == 7);
  if (!kernels::isa_available(kernels::Isa::Neon))
    CHECK_THROWS_AS(kernels::set_active_isa(kernels::Isa::Neon), std::invalid_argument);
}
