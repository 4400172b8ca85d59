#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spherepol/hierarchical.hpp"
#include "spherepol/krylov.hpp"
#include "spherepol/operators.hpp"

namespace spherepol {

enum class MatvecMode { Direct, Hierarchical };

struct MatvecSpec {
  MatvecMode mode = MatvecMode::Direct;
  FarFieldParams far;
};

const char* to_string(MatvecMode m);
std::unique_ptr<SingleLayerOperator> make_single_layer(const Configuration& config, int lmax,
                                                       const MatvecSpec& spec);

struct StrategyOptions {
  double tol = 1e-8;
  int maxit = 1000;
  // Exact discrete solution (full expansion, same lmax). When set, the
  // theorem-normalised error of every iterate is recorded.
  const CoeffVector* exact_nu = nullptr;
  // With exact_nu: iteration count at which the error first reaches this target.
  double error_target = 0;
  // When set, the iteration bound for bound_epsilon is attached to the report.
  std::optional<TheoryConstants> constants;
  double bound_epsilon = 1e-8;
};

struct StrategyResult {
  std::string solver;
  // full-space expansion coefficients of the induced surface charge
  CoeffVector nu;
  // reduced-space projection vector of the surface potential
  CoeffVector lambda;
  SolveReport report;
  std::optional<double> relative_error_vs_reference;
  std::optional<double> theorem_normalised_error;
  // theorem-normalised error of iterate k at index k (index 0 is the initial guess)
  std::vector<double> error_history;
  std::optional<int> iterations_to_error;
  // the mixed-sign fallback is not covered by the convergence theory
  bool outside_theory = false;

  double relative_residual() const { return report.residual_history.back(); }
};

// GMRES on the reduced system A_tilde lambda = b, then reconstruction of nu.
// Mixed-sign configurations fall back to GMRES on the full-space equation for
// nu and are flagged outside_theory.
StrategyResult solve_gmres_strategy(const GalerkinSystem& sys, const StrategyOptions& opt = {});
// CG on A_sym y = D_kappa b, lambda = D_kappa^{-1} y, then reconstruction.
// Throws MixedSignError for mixed-sign configurations.
StrategyResult solve_cg_strategy(const GalerkinSystem& sys, const StrategyOptions& opt = {});

enum class Normalisation { Plain, Theorem };

// Dual-norm error of approx against reference (truncated to the approx degree).
// Plain divides by |||reference|||*; Theorem divides by
// |||P0_perp reference|||* + (4 pi/kappa0) |||P0_perp Q sigma_f|||*.
// Throws std::domain_error on a zero normaliser.
double relative_error(const CoeffVector& approx, const CoeffVector& reference,
                      const Configuration& config, Normalisation mode);

// FNV-1a digest of everything that determines a reference solution.
std::uint64_t config_digest(const Configuration& config, int lmax, double tol);

// Cache directory from SPHEREPOL_CACHE_DIR; empty disables caching.
std::string reference_cache_dir();

// High-accuracy direct-mode solution. Cached on disk when a cache directory is set.
StrategyResult reference_solution(const Configuration& config, int lmax_ref = 20, double tol = 1e-13,
                                  bool use_cache = true);

}  // namespace spherepol
