#include "spherepol/solid.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace spherepol {

namespace {

void check_solid_degree(int p) {
  if (p < 0 || p > kMaxSolidDegree)
    throw std::invalid_argument("solid harmonic degree " + std::to_string(p) + " out of range");
}

const std::vector<double>& nu_table() {
  static std::vector<double> table;
  static std::once_flag once;
  std::call_once(once, [] {
    table.resize(sh_count(kMaxSolidDegree));
    for (int l = 0; l <= kMaxSolidDegree; ++l)
      for (int m = 0; m <= l; ++m)
        table[sh_index(l, m)] =
            std::exp(0.5 * (std::log((2.0 * l + 1.0) / (4.0 * std::numbers::pi)) -
                            std::lgamma(l - m + 1.0) - std::lgamma(l + m + 1.0)));
  });
  return table;
}

double sign(int k) { return (k & 1) ? -1.0 : 1.0; }

// fill m < 0 from X_n^{-m} = (-1)^m conj(X_n^m)
void mirror(int p, cplx* out) {
  for (int n = 1; n <= p; ++n)
    for (int m = 1; m <= n; ++m) out[sh_index(n, -m)] = sign(m) * std::conj(out[sh_index(n, m)]);
}

double in_scale(Basis b, int l, int m) {
  double nu = nu_factor(l, m);
  return b == Basis::Multipole ? nu : (2.0 * l + 1.0) / (4.0 * std::numbers::pi * nu);
}

double out_scale(Basis b, int l, int m) {
  double nu = nu_factor(l, m);
  return b == Basis::Multipole ? 1.0 / nu : 4.0 * std::numbers::pi * nu / (2.0 * l + 1.0);
}

// Builds the real matrix of a complex translation. kern(n, m, p, q) is the
// coefficient at output (p, q) produced by a unit input at (n, m).
template <class Kern>
void real_matrix(int pt, Basis bt, int ps, Basis bs, Kern&& kern, double* out) {
  const int Ks = sh_count(ps);
  const double h = std::numbers::sqrt2 / 2.0;
  const cplx I(0.0, 1.0);
  std::fill(out, out + std::size_t(sh_count(pt)) * Ks, 0.0);
  auto store = [&](int col, int p, int q, cplx c) {
    cplx f = c * out_scale(bt, p, q);
    if (q == 0) {
      out[std::size_t(sh_index(p, 0)) * Ks + col] = f.real();
    } else {
      double s = sign(q) * std::numbers::sqrt2;
      out[std::size_t(sh_index(p, q)) * Ks + col] = s * f.real();
      out[std::size_t(sh_index(p, -q)) * Ks + col] = -s * f.imag();
    }
  };
  for (int n = 0; n <= ps; ++n) {
    for (int a = 0; a <= n; ++a) {
      double si = in_scale(bs, n, a);
      for (int p = 0; p <= pt; ++p)
        for (int q = 0; q <= p; ++q) {
          if (a == 0) {
            store(sh_index(n, 0), p, q, si * kern(n, 0, p, q));
          } else {
            cplx kp = kern(n, a, p, q), km = kern(n, -a, p, q);
            cplx cc = si * h * (sign(a) * kp + km);
            cplx cs = si * h * I * (-sign(a) * kp + km);
            store(sh_index(n, a), p, q, cc);
            store(sh_index(n, -a), p, q, cs);
          }
        }
    }
  }
}

}  // namespace

double nu_factor(int l, int m) { return nu_table()[sh_index(l, m < 0 ? -m : m)]; }

void regular_solid(int p, const Vec3& v, cplx* out) {
  check_solid_degree(p);
  const double r2 = v.dot(v);
  const cplx w(v.x, v.y);
  out[0] = 1.0;
  for (int m = 1; m <= p; ++m) out[sh_index(m, m)] = out[sh_index(m - 1, m - 1)] * (-w) / (2.0 * m);
  for (int m = 0; m < p; ++m) out[sh_index(m + 1, m)] = v.z * out[sh_index(m, m)];
  for (int m = 0; m <= p; ++m)
    for (int n = m + 1; n < p; ++n)
      out[sh_index(n + 1, m)] =
          ((2.0 * n + 1.0) * v.z * out[sh_index(n, m)] - r2 * out[sh_index(n - 1, m)]) /
          ((n + m + 1.0) * (n - m + 1.0));
  mirror(p, out);
}

void irregular_solid(int p, const Vec3& v, cplx* out) {
  check_solid_degree(p);
  const double r2 = v.dot(v);
  if (!(r2 > 0)) throw std::domain_error("irregular solid harmonic at the origin");
  const double ir2 = 1.0 / r2;
  const cplx w(v.x, v.y);
  out[0] = 1.0 / std::sqrt(r2);
  for (int m = 1; m <= p; ++m)
    out[sh_index(m, m)] = out[sh_index(m - 1, m - 1)] * (-(2.0 * m - 1.0)) * w * ir2;
  for (int m = 0; m < p; ++m) out[sh_index(m + 1, m)] = (2.0 * m + 1.0) * v.z * ir2 * out[sh_index(m, m)];
  for (int m = 0; m <= p; ++m)
    for (int n = m + 1; n < p; ++n)
      out[sh_index(n + 1, m)] =
          ((2.0 * n + 1.0) * v.z * out[sh_index(n, m)] -
           double(n + m) * double(n - m) * out[sh_index(n - 1, m)]) * ir2;
  mirror(p, out);
}

void m2m_complex(const cplx* M, int ps, const Vec3& shift, int pt, cplx* out) {
  std::vector<cplx> rg(sh_count(pt));
  regular_solid(pt, shift, rg.data());
  for (int p = 0; p <= pt; ++p)
    for (int q = -p; q <= p; ++q) {
      cplx acc = 0;
      for (int n = 0; n <= std::min(ps, p); ++n)
        for (int m = -n; m <= n; ++m) {
          int d = p - n, e = q - m;
          if (std::abs(e) <= d) acc += M[sh_index(n, m)] * std::conj(rg[sh_index(d, e)]);
        }
      out[sh_index(p, q)] += acc;
    }
}

void m2l_complex(const cplx* M, int ps, const Vec3& shift, int pt, cplx* out) {
  std::vector<cplx> ir(sh_count(ps + pt));
  irregular_solid(ps + pt, shift, ir.data());
  for (int j = 0; j <= pt; ++j)
    for (int k = -j; k <= j; ++k) {
      cplx acc = 0;
      for (int n = 0; n <= ps; ++n)
        for (int m = -n; m <= n; ++m) acc += M[sh_index(n, m)] * ir[sh_index(n + j, m - k)];
      out[sh_index(j, k)] += sign(j + k) * acc;
    }
}

void l2l_complex(const cplx* L, int ps, const Vec3& shift, int pt, cplx* out) {
  std::vector<cplx> rg(sh_count(ps));
  regular_solid(ps, shift, rg.data());
  for (int p = 0; p <= pt; ++p)
    for (int q = -p; q <= p; ++q) {
      cplx acc = 0;
      for (int j = p; j <= ps; ++j)
        for (int k = -j; k <= j; ++k) {
          int d = j - p, e = k - q;
          if (std::abs(e) <= d) acc += L[sh_index(j, k)] * rg[sh_index(d, e)];
        }
      out[sh_index(p, q)] += acc;
    }
}

cplx eval_multipole_complex(const cplx* M, int p, const Vec3& x) {
  std::vector<cplx> ir(sh_count(p));
  irregular_solid(p, x, ir.data());
  cplx acc = 0;
  for (int i = 0; i < sh_count(p); ++i) acc += M[i] * ir[i];
  return acc;
}

cplx eval_local_complex(const cplx* L, int p, const Vec3& x) {
  std::vector<cplx> rg(sh_count(p));
  regular_solid(p, x, rg.data());
  cplx acc = 0;
  for (int i = 0; i < sh_count(p); ++i) acc += L[i] * rg[i];
  return acc;
}

void real_to_complex(const double* c, int p, Basis basis, cplx* out) {
  const double h = std::numbers::sqrt2 / 2.0;
  for (int l = 0; l <= p; ++l) {
    out[sh_index(l, 0)] = c[sh_index(l, 0)] * in_scale(basis, l, 0);
    for (int a = 1; a <= l; ++a) {
      double cc = c[sh_index(l, a)], cs = c[sh_index(l, -a)];
      double s = in_scale(basis, l, a);
      cplx fa = h * cplx(sign(a) * cc, -sign(a) * cs);
      out[sh_index(l, a)] = s * fa;
      out[sh_index(l, -a)] = s * sign(a) * std::conj(fa);
    }
  }
}

void complex_to_real(const cplx* in, int p, Basis basis, double* c) {
  for (int l = 0; l <= p; ++l) {
    c[sh_index(l, 0)] = in[sh_index(l, 0)].real() * out_scale(basis, l, 0);
    for (int a = 1; a <= l; ++a) {
      cplx f = in[sh_index(l, a)] * out_scale(basis, l, a);
      double s = sign(a) * std::numbers::sqrt2;
      c[sh_index(l, a)] = s * f.real();
      c[sh_index(l, -a)] = -s * f.imag();
    }
  }
}

double eval_multipole_real(const double* mu, int p, const Vec3& x) {
  double r = x.norm();
  std::vector<double> y = eval_real_sh_all(p, x * (1.0 / r));
  double acc = 0, rp = 1.0 / r;
  for (int l = 0; l <= p; ++l, rp /= r)
    for (int m = -l; m <= l; ++m) acc += mu[sh_index(l, m)] * y[sh_index(l, m)] * rp;
  return acc;
}

double eval_local_real(const double* lam, int p, const Vec3& x) {
  double r = x.norm();
  if (r == 0) return lam[0] * eval_real_sh({0, 0}, {0, 0, 1});
  std::vector<double> y = eval_real_sh_all(p, x * (1.0 / r));
  double acc = 0, rp = 1.0;
  for (int l = 0; l <= p; ++l, rp *= r)
    for (int m = -l; m <= l; ++m) acc += lam[sh_index(l, m)] * y[sh_index(l, m)] * rp;
  return acc;
}

void m2l_real(const Vec3& shift, int pt, int ps, double* out) {
  std::vector<cplx> ir(sh_count(ps + pt));
  irregular_solid(ps + pt, shift, ir.data());
  auto kern = [&](int n, int m, int j, int k) { return sign(j + k) * ir[sh_index(n + j, m - k)]; };
  real_matrix(pt, Basis::Local, ps, Basis::Multipole, kern, out);
}

void m2m_real(const Vec3& shift, int pt, int ps, double* out) {
  std::vector<cplx> rg(sh_count(pt));
  regular_solid(pt, shift, rg.data());
  auto kern = [&](int n, int m, int p, int q) -> cplx {
    int d = p - n, e = q - m;
    if (d < 0 || std::abs(e) > d) return 0.0;
    return std::conj(rg[sh_index(d, e)]);
  };
  real_matrix(pt, Basis::Multipole, ps, Basis::Multipole, kern, out);
}

void l2l_real(const Vec3& shift, int pt, int ps, double* out) {
  std::vector<cplx> rg(sh_count(ps));
  regular_solid(ps, shift, rg.data());
  auto kern = [&](int j, int k, int p, int q) -> cplx {
    int d = j - p, e = k - q;
    if (d < 0 || std::abs(e) > d) return 0.0;
    return rg[sh_index(d, e)];
  };
  real_matrix(pt, Basis::Local, ps, Basis::Local, kern, out);
}

}  // namespace spherepol
