#include "spherepol/operators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace spherepol {

namespace {

void require_expansion(const CoeffVector& x, const char* what) {
  if (x.representation() != Representation::Expansion)
    throw LayoutError(std::string(what) + " expects an expansion vector");
}

void require_layout(const CoeffVector& x, const Layout& layout, Representation rep, const char* what) {
  if (!(x.layout() == layout) || x.representation() != rep)
    throw LayoutError(std::string(what) + ": vector layout or representation mismatch");
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

std::vector<double> contrast(const Configuration& config) {
  std::vector<double> d;
  for (const Sphere& s : config.spheres) d.push_back((s.kappa - config.kappa0) / config.kappa0);
  return d;
}

CoeffVector apply_DtN(const CoeffVector& x, const Configuration& config) {
  require_expansion(x, "DtN");
  CoeffVector y = x;
  for (std::size_t i = 0; i < x.spheres(); ++i) {
    double r = config.spheres.at(i).radius;
    for (int l = x.layout().first_degree(); l <= x.lmax(); ++l)
      for (int m = -l; m <= l; ++m) y.at(i, l, m) *= l / r;
  }
  return y;
}

std::vector<double> dkappa_diagonal(const Configuration& config, int lmax) {
  Layout lay{config.size(), lmax, Space::Reduced};
  std::vector<double> d(lay.size());
  auto delta = contrast(config);
  for (std::size_t i = 0; i < config.size(); ++i) {
    double r = config.spheres[i].radius;
    for (int l = 1; l <= lmax; ++l)
      for (int m = -l; m <= l; ++m) d[lay.offset(i, l, m)] = std::sqrt(std::abs(delta[i]) * l) / std::pow(r, 1.5);
  }
  return d;
}

GalerkinSystem::GalerkinSystem(const SingleLayerOperator& V)
    : V_(V), sign_(sign_case(V.config())), delta_(contrast(V.config())) {
  if (V.lmax() < 1) throw LayoutError("the reduced system needs lmax >= 1");
  s_ = sign_ == SignCase::AllLess ? -1.0 : 1.0;
  dk_ = dkappa_diagonal(V.config(), V.lmax());
}

void GalerkinSystem::require_uniform() const {
  if (sign_ == SignCase::Mixed)
    throw MixedSignError(
        "mixed-sign dielectric configuration: the square root of DtN^kappa does not exist when "
        "some kappa_i exceed kappa0 and others do not");
}

void GalerkinSystem::apply_V_reduced(const double* x, double* y) const {
  const Layout f = full_layout(), r = reduced_layout();
  const int Kf = f.per_sphere(), Kr = r.per_sphere();
  std::vector<double> xf(f.size(), 0.0), yf(f.size());
  for (std::size_t i = 0; i < f.spheres; ++i)
    std::copy(x + i * Kr, x + (i + 1) * Kr, xf.begin() + i * Kf + 1);
  V_.apply(xf.data(), yf.data());
  for (std::size_t i = 0; i < f.spheres; ++i)
    std::copy(yf.begin() + i * Kf + 1, yf.begin() + (i + 1) * Kf, y + i * Kr);
}

void GalerkinSystem::apply_A_tilde(const double* x, double* y) const {
  require_uniform();
  const std::size_t n = dim();
  std::vector<double> z(n), t(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = dk_[k] * dk_[k] * x[k];
  apply_V_reduced(z.data(), t.data());
  for (std::size_t k = 0; k < n; ++k) y[k] = x[k] + s_ * t[k];
}

void GalerkinSystem::apply_A_sym(const double* x, double* y) const {
  require_uniform();
  const std::size_t n = dim();
  std::vector<double> z(n), t(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = dk_[k] * x[k];
  apply_V_reduced(z.data(), t.data());
  for (std::size_t k = 0; k < n; ++k) y[k] = x[k] + s_ * dk_[k] * t[k];
}

void GalerkinSystem::apply_A_star_full(const double* x, double* y) const {
  const Layout f = full_layout();
  const int K = f.per_sphere();
  std::vector<double> v(f.size());
  V_.apply(x, v.data());
  for (std::size_t i = 0; i < f.spheres; ++i) {
    double r = config().spheres[i].radius;
    for (int l = 0; l <= lmax(); ++l)
      for (int m = -l; m <= l; ++m) {
        std::size_t k = i * K + sh_index(l, m);
        y[k] = r * r * x[k] + delta_[i] * (l / r) * v[k];
      }
  }
}

void GalerkinSystem::apply_A_star_scaled(const double* x, double* y) const {
  const Layout f = full_layout();
  const int K = f.per_sphere();
  std::vector<double> v(f.size());
  V_.apply(x, v.data());
  for (std::size_t i = 0; i < f.spheres; ++i) {
    double r = config().spheres[i].radius;
    for (int l = 0; l <= lmax(); ++l)
      for (int m = -l; m <= l; ++m) {
        std::size_t k = i * K + sh_index(l, m);
        y[k] = x[k] + delta_[i] * (l / (r * r * r)) * v[k];
      }
  }
}

CoeffVector GalerkinSystem::scaled_free_charge() const {
  CoeffVector q = free_charge_expansion(config(), lmax());
  for (double& v : q.values()) v *= 4.0 * std::numbers::pi / config().kappa0;
  return q;
}

CoeffVector GalerkinSystem::rhs() const {
  CoeffVector q = scaled_free_charge();
  CoeffVector y(full_layout(), Representation::Projection);
  V_.apply(q.data(), y.data());
  return to_reduced(y);
}

CoeffVector GalerkinSystem::star_rhs() const { return to_projection(scaled_free_charge(), config()); }

CoeffVector GalerkinSystem::reconstruct(const CoeffVector& lambda) const {
  require_layout(lambda, reduced_layout(), Representation::Projection, "reconstruct");
  CoeffVector nu = scaled_free_charge();
  for (std::size_t i = 0; i < config().size(); ++i) {
    double r = config().spheres[i].radius;
    for (int l = 1; l <= lmax(); ++l)
      for (int m = -l; m <= l; ++m) nu.at(i, l, m) = -delta_[i] * (l / r) * lambda.at(i, l, m) / (r * r);
  }
  return nu;
}

CoeffVector apply_A_tilde(const GalerkinSystem& sys, const CoeffVector& x) {
  require_layout(x, sys.reduced_layout(), Representation::Projection, "A_tilde");
  CoeffVector y(sys.reduced_layout(), Representation::Projection);
  sys.apply_A_tilde(x.data(), y.data());
  return y;
}

CoeffVector apply_A_sym(const GalerkinSystem& sys, const CoeffVector& x) {
  require_layout(x, sys.reduced_layout(), Representation::Projection, "A_sym");
  CoeffVector y(sys.reduced_layout(), Representation::Projection);
  sys.apply_A_sym(x.data(), y.data());
  return y;
}

CoeffVector apply_A_star_full(const GalerkinSystem& sys, const CoeffVector& x) {
  require_layout(x, sys.full_layout(), Representation::Expansion, "A*");
  CoeffVector y(sys.full_layout(), Representation::Projection);
  sys.apply_A_star_full(x.data(), y.data());
  return y;
}

CoeffVector assemble_rhs(const GalerkinSystem& sys) { return sys.rhs(); }

double triple_norm(const CoeffVector& x, const Configuration& config) {
  CoeffVector e = to_expansion(x, config);
  double s = 0;
  for (std::size_t i = 0; i < e.spheres(); ++i) {
    double r = config.spheres.at(i).radius;
    for (int l = e.layout().first_degree(); l <= e.lmax(); ++l) {
      double w = l == 0 ? r * r : r * l;
      for (int m = -l; m <= l; ++m) s += w * e.at(i, l, m) * e.at(i, l, m);
    }
  }
  return std::sqrt(s);
}

double triple_norm_dual(const CoeffVector& x, const Configuration& config) {
  CoeffVector p = to_projection(x, config);
  double s = 0;
  for (std::size_t i = 0; i < p.spheres(); ++i) {
    double r = config.spheres.at(i).radius;
    for (int l = p.layout().first_degree(); l <= p.lmax(); ++l) {
      double w = l == 0 ? r * r : r * l;
      for (int m = -l; m <= l; ++m) s += p.at(i, l, m) * p.at(i, l, m) / w;
    }
  }
  return std::sqrt(s);
}

TheoryConstants compute_theory_constants(const Configuration& config, double c_equiv, double c_V) {
  SignCase sc = sign_case(config);
  if (sc == SignCase::Mixed)
    throw MixedSignError("alpha0 is undefined for a mixed-sign dielectric configuration");
  if (!(c_V > 0)) throw std::invalid_argument("c_V must be positive");
  TheoryConstants t;
  t.c_equiv = c_equiv;
  t.c_V = c_V;
  const double k0 = config.kappa0;
  double dmax = 0, dmin = std::numeric_limits<double>::infinity();
  double beta_num = std::numeric_limits<double>::infinity();
  double rmin = dmin, rmax = 0, kmin = dmin;
  for (const Sphere& s : config.spheres) {
    double d = std::abs(s.kappa - k0) / k0;
    dmax = std::max(dmax, d);
    dmin = std::min(dmin, d);
    rmin = std::min(rmin, s.radius);
    rmax = std::max(rmax, s.radius);
    kmin = std::min(kmin, s.kappa / k0);
    beta_num = std::min(beta_num, s.kappa > k0 ? (s.kappa - k0) / k0 : (s.kappa / k0) * (k0 - s.kappa) / k0);
  }
  t.delta_max = dmax;
  t.C_A_tilde = 1.0 + dmax * c_equiv / std::sqrt(c_V);
  t.beta_A_tilde = beta_num / dmax;
  t.alpha0 = sc == SignCase::AllGreater ? 1.0 : kmin;
  // |kappa - kappa0| extrema ratio equals the ratio of relative contrasts
  t.upsilon_gmres = 2.0 * t.C_A_tilde / t.beta_A_tilde * std::pow(rmax / rmin, 3) *
                    std::sqrt(dmax / dmin) * (1.0 / dmin);
  return t;
}

std::vector<double> dense_operator(std::size_t n, const std::function<void(const double*, double*)>& f) {
  std::vector<double> A(n * n), e(n, 0.0), col(n);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    f(e.data(), col.data());
    e[c] = 0.0;
    for (std::size_t r = 0; r < n; ++r) A[r * n + c] = col[r];
  }
  return A;
}

std::vector<double> dense_A_tilde(const GalerkinSystem& sys) {
  return dense_operator(sys.dim(), [&](const double* x, double* y) { sys.apply_A_tilde(x, y); });
}

std::vector<double> dense_A_sym(const GalerkinSystem& sys) {
  return dense_operator(sys.dim(), [&](const double* x, double* y) { sys.apply_A_sym(x, y); });
}

CvEstimate estimate_cV(const SingleLayerOperator& V, std::size_t dense_limit, int max_steps, double tol) {
  GalerkinSystem sys(V);
  const Layout lay = sys.reduced_layout();
  const std::size_t n = lay.size();
  std::vector<double> isw(n);
  for (std::size_t i = 0; i < lay.spheres; ++i) {
    double r = V.config().spheres[i].radius;
    for (int l = 1; l <= V.lmax(); ++l)
      for (int m = -l; m <= l; ++m) isw[lay.offset(i, l, m)] = std::sqrt(l / (r * r * r));
  }
  // S = W^{-1/2} P0_perp V W^{-1/2} with W = r^3 / l
  auto S = [&](const double* x, double* y) {
    std::vector<double> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = isw[k] * x[k];
    sys.apply_V_reduced(z.data(), y);
    for (std::size_t k = 0; k < n; ++k) y[k] *= isw[k];
  };
  CvEstimate est;
  if (n <= dense_limit) {
    std::vector<double> A = dense_operator(n, S);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(A.data(), n, n);
    Eigen::MatrixXd Ms = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ms, Eigen::EigenvaluesOnly);
    est.value = es.eigenvalues()(0);
    est.dense = true;
    return est;
  }
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> Q;
  std::vector<double> alpha, beta;
  std::vector<double> q(n), w(n);
  for (double& v : q) v = g(rng);
  double nq = std::sqrt(dot(q, q));
  for (double& v : q) v /= nq;
  const int steps = int(std::min<std::size_t>(max_steps, n));
  for (int j = 0; j < steps; ++j) {
    Q.push_back(q);
    S(q.data(), w.data());
    alpha.push_back(dot(w, q));
    // full reorthogonalisation, applied twice
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& qi : Q) {
        double c = dot(w, qi);
        for (std::size_t k = 0; k < n; ++k) w[k] -= c * qi[k];
      }
    double b = std::sqrt(dot(w, w));
    const int m = j + 1;
    if (m % 10 == 0 || m == steps || b < 1e-14) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      est.value = es.eigenvalues()(0);
      est.residual = b * std::abs(es.eigenvectors()(m - 1, 0));
      est.steps = m;
      if (est.residual <= tol * std::abs(est.value) || b < 1e-14) break;
    }
    beta.push_back(b);
    for (std::size_t k = 0; k < n; ++k) q[k] = w[k] / b;
  }
  return est;
}

}  // namespace spherepol
