#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "spherepol/coeff.hpp"
#include "spherepol/geometry.hpp"
#include "spherepol/single_layer.hpp"

namespace spherepol {

// Raised when an operation needs all kappa_i on one side of kappa0.
class MixedSignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// (kappa_i - kappa0) / kappa0 per sphere.
std::vector<double> contrast(const Configuration& config);

// Multiplies entry (i, l, m) by l / r_i (zero at l = 0). Expansion vectors only.
CoeffVector apply_DtN(const CoeffVector& x, const Configuration& config);

// Diagonal D_kappa on the reduced layout acting on projection vectors:
// sqrt(|kappa_i - kappa0| / kappa0 * l) * r_i^{-3/2}. Its square maps a
// projection vector of lambda to the expansion vector of DtN^kappa lambda, so
// that D_kappa V D_kappa is the symmetric form of the reduced operator.
std::vector<double> dkappa_diagonal(const Configuration& config, int lmax);

// The reduced Galerkin system on projection vectors of the surface potential,
//   A_tilde x = x + s P0_perp V (D_kappa^2 x),  s = +1 if kappa > kappa0, -1 if below,
//   A_sym   y = y + s D_kappa P0_perp V (D_kappa y),
// with A_tilde = D_kappa^{-1} A_sym D_kappa, and the full-space operator
//   A* nu = R nu - ((kappa0 - kappa)/kappa0) (l/r) V nu      (projection output, R = r^2).
class GalerkinSystem {
 public:
  explicit GalerkinSystem(const SingleLayerOperator& V);

  const Configuration& config() const { return V_.config(); }
  const SingleLayerOperator& single_layer() const { return V_; }
  int lmax() const { return V_.lmax(); }
  SignCase sign() const { return sign_; }
  Layout reduced_layout() const { return {config().size(), lmax(), Space::Reduced}; }
  Layout full_layout() const { return V_.full_layout(); }
  std::size_t dim() const { return reduced_layout().size(); }
  const std::vector<double>& dkappa() const { return dk_; }

  // reduced expansion -> reduced projection, P0_perp V restricted
  void apply_V_reduced(const double* x, double* y) const;
  void apply_A_tilde(const double* x, double* y) const;
  void apply_A_sym(const double* x, double* y) const;
  // full expansion -> full projection
  void apply_A_star_full(const double* x, double* y) const;
  // Mixed-sign fallback on full expansion vectors of nu: nu - R^{-1} A-part, i.e.
  // x - ((kappa0-kappa)/kappa0)(l/r^3) V x, whose solution is the Galerkin nu.
  void apply_A_star_scaled(const double* x, double* y) const;

  // Reduced projection right-hand side (4 pi / kappa0) P0_perp V Q sigma_f.
  CoeffVector rhs() const;
  // (4 pi / kappa0) R Q sigma_f: the right-hand side of the full-space equation.
  CoeffVector star_rhs() const;
  // (4 pi / kappa0) Q sigma_f as a full expansion vector.
  CoeffVector scaled_free_charge() const;
  // nu = ((kappa0 - kappa)/kappa0) DtN lambda + (4 pi / kappa0) Q sigma_f from the
  // reduced projection vector of lambda; full expansion output.
  CoeffVector reconstruct(const CoeffVector& lambda) const;

 private:
  void require_uniform() const;

  const SingleLayerOperator& V_;
  SignCase sign_;
  double s_ = 1.0;
  std::vector<double> delta_;  // per sphere (kappa_i - kappa0)/kappa0
  std::vector<double> dk_;
};

CoeffVector apply_A_tilde(const GalerkinSystem& sys, const CoeffVector& x);
CoeffVector apply_A_sym(const GalerkinSystem& sys, const CoeffVector& x);
CoeffVector apply_A_star_full(const GalerkinSystem& sys, const CoeffVector& x);
CoeffVector assemble_rhs(const GalerkinSystem& sys);

// |||x|||^2 = sum r^2 x_{i00}^2 + sum_{l>=1} r l x_{ilm}^2 on expansion vectors.
double triple_norm(const CoeffVector& x, const Configuration& config);
// Discrete dual norm: inverse weights on the pairing values, i.e.
// sum p0^2/r^2 + sum p^2/(r l) for projection vectors p.
double triple_norm_dual(const CoeffVector& x, const Configuration& config);

struct TheoryConstants {
  double C_A_tilde = 0;
  double beta_A_tilde = 0;
  double alpha0 = 0;
  double upsilon_gmres = 0;
  double c_equiv = 1;
  double c_V = 0;
  // max |kappa - kappa0| / kappa0
  double delta_max = 0;
};

// Throws MixedSignError for mixed configurations (alpha0 undefined).
TheoryConstants compute_theory_constants(const Configuration& config, double c_equiv, double c_V);

struct CvEstimate {
  double value = 0;
  // residual norm of the extremal Ritz pair (0 for the dense path)
  double residual = 0;
  int steps = 0;
  bool dense = false;
};

// Smallest eigenvalue of the reduced V in the dual-norm weights, i.e. the
// minimum over x of <x, V x> / |||x|||*^2. Dense when the dimension is at most
// dense_limit, Lanczos with full reorthogonalisation otherwise.
CvEstimate estimate_cV(const SingleLayerOperator& V, std::size_t dense_limit = 1500,
                       int max_steps = 600, double tol = 1e-9);

// Dense row-major matrices of the reduced operators (small problems only).
std::vector<double> dense_A_tilde(const GalerkinSystem& sys);
std::vector<double> dense_A_sym(const GalerkinSystem& sys);
std::vector<double> dense_operator(std::size_t n, const std::function<void(const double*, double*)>& f);

}  // namespace spherepol
