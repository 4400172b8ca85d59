#include "spherepol/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace spherepol {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

double nrm(const std::vector<double>& a) { return std::sqrt(dot(a.data(), a.data(), a.size())); }

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::vector<double> initial_guess(const KrylovOptions& opt, std::size_t n) {
  if (opt.x0.empty()) return std::vector<double>(n, 0.0);
  if (opt.x0.size() != n) throw std::invalid_argument("initial guess has the wrong dimension");
  return opt.x0;
}

void check_args(const LinearMap& A, const std::vector<double>& b, const KrylovOptions& opt) {
  if (b.size() != A.dim) throw std::invalid_argument("right-hand side has the wrong dimension");
  if (!(opt.tol > 0)) throw std::invalid_argument("tolerance must be positive");
  if (opt.maxit < 0) throw std::invalid_argument("maxit must be non-negative");
}

// residual r = b - A x0; one uncounted matvec when x0 is nonzero
std::vector<double> initial_residual(const LinearMap& A, const std::vector<double>& b,
                                     const std::vector<double>& x) {
  std::vector<double> r = b;
  if (std::any_of(x.begin(), x.end(), [](double v) { return v != 0.0; })) {
    std::vector<double> ax(A.dim);
    A.apply(x.data(), ax.data());
    for (std::size_t k = 0; k < A.dim; ++k) r[k] -= ax[k];
  }
  return r;
}

}  // namespace

std::vector<double> gmres(const LinearMap& A, const std::vector<double>& b, const KrylovOptions& opt,
                          SolveReport& report) {
  check_args(A, b, opt);
  Timer timer;
  const std::size_t n = A.dim;
  report = SolveReport{};
  std::vector<double> x = initial_guess(opt, n);
  const double bnorm = nrm(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    report.residual_history = {0.0};
    report.converged = true;
    report.wall_time = timer.seconds();
    return x;
  }
  std::vector<double> r = initial_residual(A, b, x);
  double beta = nrm(r);
  report.residual_history.push_back(beta / bnorm);
  if (beta / bnorm <= opt.tol) {
    report.converged = true;
    report.wall_time = timer.seconds();
    return x;
  }
  const int m = opt.maxit;
  std::vector<std::vector<double>> V;
  V.reserve(m + 1);
  V.emplace_back(n);
  for (std::size_t k = 0; k < n; ++k) V[0][k] = r[k] / beta;
  // column j of the Hessenberg matrix, already rotated, stored upper triangular
  std::vector<std::vector<double>> H;
  std::vector<double> cs, sn, g{beta};
  const std::vector<double> x0 = x;

  auto solve_iterate = [&](int k) {
    std::vector<double> y(k);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H[j][i] * y[j];
      y[i] = s / H[i][i];
    }
    std::vector<double> xk = x0;
    for (int j = 0; j < k; ++j)
      for (std::size_t t = 0; t < n; ++t) xk[t] += y[j] * V[j][t];
    return xk;
  };

  int k = 0;
  bool stop = false;
  while (k < m && !stop) {
    std::vector<double> w(n);
    A.apply(V[k].data(), w.data());
    std::vector<double> h(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) {
      h[i] = dot(w.data(), V[i].data(), n);
      for (std::size_t t = 0; t < n; ++t) w[t] -= h[i] * V[i][t];
    }
    h[k + 1] = nrm(w);
    for (int i = 0; i < k; ++i) {
      double a = cs[i] * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
      h[i] = a;
    }
    double den = std::hypot(h[k], h[k + 1]);
    double c = den == 0 ? 1.0 : h[k] / den, s = den == 0 ? 0.0 : h[k + 1] / den;
    const double hnext = h[k + 1];
    cs.push_back(c);
    sn.push_back(s);
    h[k] = den;
    h[k + 1] = 0.0;
    g.push_back(-s * g[k]);
    g[k] = c * g[k];
    H.push_back(h);
    ++k;
    double rel = std::abs(g[k]) / bnorm;
    report.residual_history.push_back(rel);
    bool breakdown = hnext <= 1e-14 * std::max(den, 1e-300);
    bool done = rel <= opt.tol || breakdown;
    if (opt.observer) stop = opt.observer(k, solve_iterate(k));
    if (done) {
      report.converged = true;
      break;
    }
    V.emplace_back(n);
    for (std::size_t t = 0; t < n; ++t) V[k][t] = w[t] / hnext;
  }
  report.iterations = k;
  x = solve_iterate(k);
  report.wall_time = timer.seconds();
  return x;
}

std::vector<double> cg(const LinearMap& A, const std::vector<double>& b, const KrylovOptions& opt,
                       SolveReport& report) {
  check_args(A, b, opt);
  if (!A.symmetric) throw std::invalid_argument("CG requires a map flagged symmetric");
  Timer timer;
  const std::size_t n = A.dim;
  report = SolveReport{};
  std::vector<double> x = initial_guess(opt, n);
  const double bnorm = nrm(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    report.residual_history = {0.0};
    report.converged = true;
    report.wall_time = timer.seconds();
    return x;
  }
  std::vector<double> r = initial_residual(A, b, x), p = r, ap(n);
  double rr = dot(r.data(), r.data(), n);
  report.residual_history.push_back(std::sqrt(rr) / bnorm);
  if (std::sqrt(rr) / bnorm <= opt.tol) {
    report.converged = true;
    report.wall_time = timer.seconds();
    return x;
  }
  int k = 0;
  while (k < opt.maxit) {
    A.apply(p.data(), ap.data());
    double pap = dot(p.data(), ap.data(), n);
    if (!(pap > 0))
      throw IndefiniteError(
          "CG met non-positive curvature: the operator is not positive definite, so the "
          "eigenvalue lower bound alpha0 > 0 of the sign-uniform case does not hold");
    double alpha = rr / pap;
    for (std::size_t t = 0; t < n; ++t) {
      x[t] += alpha * p[t];
      r[t] -= alpha * ap[t];
    }
    ++k;
    double rr_new = dot(r.data(), r.data(), n);
    double rel = std::sqrt(rr_new) / bnorm;
    report.residual_history.push_back(rel);
    bool stop = opt.observer ? opt.observer(k, x) : false;
    if (rel <= opt.tol) {
      report.converged = true;
      break;
    }
    if (stop) break;
    double bet = rr_new / rr;
    rr = rr_new;
    for (std::size_t t = 0; t < n; ++t) p[t] = r[t] + bet * p[t];
  }
  report.iterations = k;
  report.wall_time = timer.seconds();
  return x;
}

int iteration_bound_gmres(const TheoryConstants& t, int lmax, double epsilon) {
  double ratio = t.C_A_tilde / t.alpha0;
  if (!(ratio > 1.0)) throw std::domain_error("C_A_tilde / alpha0 must exceed 1");
  double sq = std::sqrt(ratio);
  double q = (sq - 1.0) / (sq + 1.0);
  double eps_tilde = epsilon / t.delta_max;
  double v = std::log(eps_tilde / (lmax * t.upsilon_gmres)) / std::log(q);
  return std::max(0, int(std::ceil(v)));
}

int iteration_bound_cg(const TheoryConstants& t, int lmax, double epsilon) {
  return iteration_bound_gmres(t, lmax, epsilon);
}

double chebyshev_envelope(double kappa_bound, int steps) {
  if (kappa_bound < 1.0) throw std::domain_error("condition bound must be >= 1");
  double sq = std::sqrt(kappa_bound);
  return 2.0 * std::pow((sq - 1.0) / (sq + 1.0), steps);
}

}  // namespace spherepol
