#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "spherepol/geometry.hpp"

namespace spherepol {

inline constexpr int kMaxDegree = 64;

struct ShIndex {
  int l = 0;
  int m = 0;
};

// Flat position of (l, m) in a per-sphere block: l^2 + l + m.
constexpr int sh_index(int l, int m) { return l * l + l + m; }
constexpr int sh_count(int lmax) { return (lmax + 1) * (lmax + 1); }
ShIndex sh_from_index(int idx);

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Normalised associated Legendre values N_lm P_l^m(x) for 0 <= m <= l <= lmax,
// without the Condon-Shortley phase, stored at [l*(l+1)/2 + m].
void normalized_legendre(int lmax, double x, double* out);
constexpr int legendre_index(int l, int m) { return l * (l + 1) / 2 + m; }

// Real L2(S^2)-orthonormal harmonics, no Condon-Shortley phase:
//   m > 0: sqrt(2) N P_l^m cos(m phi),  m < 0: sqrt(2) N P_l^|m| sin(|m| phi).
// Low degrees:
//   Y_00 = 1/sqrt(4 pi)
//   Y_1,-1 = c1 y,  Y_10 = c1 z,  Y_11 = c1 x,           c1 = sqrt(3/(4 pi))
//   Y_2,-2 = c2 xy, Y_2,-1 = c2 yz, Y_21 = c2 xz,          c2 = sqrt(15/(4 pi))
//   Y_20 = sqrt(5/(16 pi)) (3z^2 - 1),  Y_22 = sqrt(15/(16 pi)) (x^2 - y^2)
double eval_real_sh(ShIndex idx, const Vec3& u);
// All harmonics up to lmax at a unit vector; out has sh_count(lmax) entries.
void eval_real_sh_all(int lmax, const Vec3& u, double* out);
std::vector<double> eval_real_sh_all(int lmax, const Vec3& u);

struct QuadratureRule {
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  // spherical polynomials up to this degree are integrated exactly
  int degree = 0;
};

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Tensor rule: Gauss-Legendre in cos(theta) times uniform azimuth.
QuadratureRule quadrature_rule(int order);

// Values (f, Y^i_lm) over the sphere surface, Jacobian r^2 included.
// f receives points in space. The rule has degree `order` (default 2*lmax + 8).
std::vector<double> project_onto_sphere(const std::function<double(const Vec3&)>& f,
                                        const Sphere& sphere, int lmax, int order = -1);

}  // namespace spherepol
