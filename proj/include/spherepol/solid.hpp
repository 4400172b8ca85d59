#pragma once

#include <complex>
#include <vector>

#include "spherepol/geometry.hpp"
#include "spherepol/harmonics.hpp"

namespace spherepol {

using cplx = std::complex<double>;

// Complex solid harmonics with the Condon-Shortley phase,
//   Rg_n^m(v) = r^n P_n^m(cos t) e^{i m p} / (n+m)!
//   Ir_n^m(v) = (n-m)! P_n^m(cos t) e^{i m p} / r^{n+1}
// stored for all -n <= m <= n at sh_index(n, m). In this normalisation
//   1/|x - y| = sum conj(Rg_n^m(y)) Ir_n^m(x)            (|y| < |x|)
//   Rg_n^m(a + b) = sum Rg_j^k(a) Rg_{n-j}^{m-k}(b)
//   Ir_n^m(t + u) = sum (-1)^j conj(Rg_j^k(u)) Ir_{n+j}^{m+k}(t)   (|u| < |t|)
inline constexpr int kMaxSolidDegree = 128;

void regular_solid(int p, const Vec3& v, cplx* out);
void irregular_solid(int p, const Vec3& v, cplx* out);

// sqrt((2l+1)/(4 pi)) / sqrt((l-m)! (l+m)!), m >= 0
double nu_factor(int l, int m);

// Coefficient arrays are complex over all m, sized sh_count(p).
// Multipole about c: phi(x) = sum M Ir(x - c); local about c: phi(x) = sum L Rg(x - c).
// shift for m2m is old_center - new_center, for l2l new_center - old_center,
// for m2l local_center - multipole_center. Results accumulate into out.
void m2m_complex(const cplx* M, int ps, const Vec3& shift, int pt, cplx* out);
void m2l_complex(const cplx* M, int ps, const Vec3& shift, int pt, cplx* out);
void l2l_complex(const cplx* L, int ps, const Vec3& shift, int pt, cplx* out);
cplx eval_multipole_complex(const cplx* M, int p, const Vec3& x);
cplx eval_local_complex(const cplx* L, int p, const Vec3& x);

// Real expansions over the real harmonics Y_lm:
//   multipole  phi(x) = sum mu_lm  Y_lm(x/|x|) / |x|^{l+1}
//   local      phi(x) = sum lam_lm |x|^l Y_lm(x/|x|)
enum class Basis { Multipole, Local };

void real_to_complex(const double* c, int p, Basis basis, cplx* out);
void complex_to_real(const cplx* in, int p, Basis basis, double* c);
double eval_multipole_real(const double* mu, int p, const Vec3& x);
double eval_local_real(const double* lam, int p, const Vec3& x);

// Real translation matrices, row-major sh_count(pt) x sh_count(ps), overwritten.
void m2l_real(const Vec3& shift, int pt, int ps, double* out);
void m2m_real(const Vec3& shift, int pt, int ps, double* out);
void l2l_real(const Vec3& shift, int pt, int ps, double* out);

}  // namespace spherepol
