#include "spherepol/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace spherepol {

namespace {

void check_degree(int lmax) {
  if (lmax < 0 || lmax > kMaxDegree)
    throw std::invalid_argument("harmonic degree " + std::to_string(lmax) + " outside [0, " +
                                std::to_string(kMaxDegree) + "]");
}

void check_unit(const Vec3& u) {
  if (std::abs(u.norm() - 1.0) > 1e-8) throw DomainError("direction is not a unit vector");
}

}  // namespace

ShIndex sh_from_index(int idx) {
  int l = static_cast<int>(std::sqrt(double(idx)));
  while (l * l > idx) --l;
  while ((l + 1) * (l + 1) <= idx) ++l;
  return {l, idx - l * l - l};
}

void normalized_legendre(int lmax, double x, double* out) {
  check_degree(lmax);
  double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  out[0] = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  // diagonal, then one step off the diagonal, then the three-term recurrence in l
  for (int m = 1; m <= lmax; ++m)
    out[legendre_index(m, m)] =
        std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * out[legendre_index(m - 1, m - 1)];
  for (int m = 0; m < lmax; ++m)
    out[legendre_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * out[legendre_index(m, m)];
  for (int m = 0; m <= lmax; ++m)
    for (int l = m + 2; l <= lmax; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      out[legendre_index(l, m)] =
          a * (x * out[legendre_index(l - 1, m)] - b * out[legendre_index(l - 2, m)]);
    }
}

void eval_real_sh_all(int lmax, const Vec3& u, double* out) {
  check_degree(lmax);
  check_unit(u);
  double p[legendre_index(kMaxDegree, kMaxDegree) + 1];
  double z = std::clamp(u.z, -1.0, 1.0);
  normalized_legendre(lmax, z, p);
  double phi = std::atan2(u.y, u.x);
  const double r2 = std::numbers::sqrt2;
  for (int l = 0; l <= lmax; ++l) {
    out[sh_index(l, 0)] = p[legendre_index(l, 0)];
    for (int m = 1; m <= l; ++m) {
      double q = r2 * p[legendre_index(l, m)];
      out[sh_index(l, m)] = q * std::cos(m * phi);
      out[sh_index(l, -m)] = q * std::sin(m * phi);
    }
  }
}

std::vector<double> eval_real_sh_all(int lmax, const Vec3& u) {
  std::vector<double> out(sh_count(lmax));
  eval_real_sh_all(lmax, u, out.data());
  return out;
}

double eval_real_sh(ShIndex idx, const Vec3& u) {
  if (std::abs(idx.m) > idx.l) throw std::invalid_argument("|m| > l");
  return eval_real_sh_all(idx.l, u)[sh_index(idx.l, idx.m)];
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute the derivative at the converged node
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

QuadratureRule quadrature_rule(int order) {
  if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
  int nt = order / 2 + 1;
  int np = order + 1;
  std::vector<double> x, w;
  gauss_legendre(nt, x, w);
  QuadratureRule q;
  q.degree = order;
  q.nodes.reserve(std::size_t(nt) * np);
  q.weights.reserve(std::size_t(nt) * np);
  for (int a = 0; a < nt; ++a) {
    double s = std::sqrt(std::max(0.0, 1.0 - x[a] * x[a]));
    for (int b = 0; b < np; ++b) {
      double phi = 2.0 * std::numbers::pi * b / np;
      q.nodes.push_back({s * std::cos(phi), s * std::sin(phi), x[a]});
      q.weights.push_back(w[a] * 2.0 * std::numbers::pi / np);
    }
  }
  return q;
}

std::vector<double> project_onto_sphere(const std::function<double(const Vec3&)>& f,
                                        const Sphere& sphere, int lmax, int order) {
  check_degree(lmax);
  if (order < 0) order = 2 * lmax + 8;
  QuadratureRule q = quadrature_rule(order);
  int K = sh_count(lmax);
  std::vector<double> out(K, 0.0), y(K);
  double r2 = sphere.radius * sphere.radius;
  for (std::size_t n = 0; n < q.nodes.size(); ++n) {
    double v = f(sphere.center + q.nodes[n] * sphere.radius) * q.weights[n] * r2;
    eval_real_sh_all(lmax, q.nodes[n], y.data());
    for (int k = 0; k < K; ++k) out[k] += v * y[k];
  }
  return out;
}

}  // namespace spherepol
