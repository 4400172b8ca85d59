#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spherepol/operators.hpp"

namespace spherepol {

struct LinearMap {
  std::size_t dim = 0;
  // y = A x; y is overwritten
  std::function<void(const double*, double*)> apply;
  bool symmetric = false;
};

struct SolveReport {
  // matvec-bearing iterations, not counting an initial residual evaluation
  int iterations = 0;
  // relative residuals ||b - A x_k|| / ||b||, starting with x0
  std::vector<double> residual_history;
  bool converged = false;
  double wall_time = 0;
  std::optional<int> bound_R_epsilon;
  std::optional<int> bound_S_epsilon;
};

struct KrylovOptions {
  double tol = 1e-8;
  int maxit = 1000;
  // empty means zero
  std::vector<double> x0;
  // Called with (k, x_k) after each iteration; returning true stops the solve.
  std::function<bool(int, const std::vector<double>&)> observer;
};

// Raised by CG when it meets a direction of non-positive curvature.
class IndefiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Full GMRES: Arnoldi with modified Gram-Schmidt, Givens rotations on the
// Hessenberg least-squares problem, no restarts.
std::vector<double> gmres(const LinearMap& A, const std::vector<double>& b, const KrylovOptions& opt,
                          SolveReport& report);

std::vector<double> cg(const LinearMap& A, const std::vector<double>& b, const KrylovOptions& opt,
                       SolveReport& report);

// Iterations after which the theorem guarantees relative error epsilon:
// ceil(log(eps~ / (lmax Upsilon)) / log((sqrt(C/alpha0) - 1)/(sqrt(C/alpha0) + 1)))
// with eps~ = epsilon / delta_max. Throws std::domain_error if C/alpha0 <= 1.
int iteration_bound_gmres(const TheoryConstants& t, int lmax, double epsilon);
// The CG bound has the same form and uses the same constants.
int iteration_bound_cg(const TheoryConstants& t, int lmax, double epsilon);

// 2 ((sqrt(k) - 1)/(sqrt(k) + 1))^steps for a condition bound k >= 1.
double chebyshev_envelope(double kappa_bound, int steps);

}  // namespace spherepol
