#include "spherepol/strategies.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "spherepol/solution_io.hpp"

namespace spherepol {

namespace {

constexpr std::size_t kReferenceDimLimit = 2'000'000;

struct ErrorTracker {
  const GalerkinSystem& sys;
  const StrategyOptions& opt;
  StrategyResult& res;

  // lambda_proj: reduced projection vector of the iterate
  void record(int k, const std::vector<double>& lambda_proj) {
    CoeffVector lam(sys.reduced_layout(), Representation::Projection);
    lam.values() = lambda_proj;
    double e = relative_error(sys.reconstruct(lam), *opt.exact_nu, sys.config(), Normalisation::Theorem);
    if (int(res.error_history.size()) <= k) res.error_history.resize(k + 1, 0.0);
    res.error_history[k] = e;
    if (opt.error_target > 0 && e <= opt.error_target && !res.iterations_to_error)
      res.iterations_to_error = k;
  }
};

void finish(const GalerkinSystem& sys, const StrategyOptions& opt, StrategyResult& res) {
  if (opt.exact_nu)
    res.theorem_normalised_error = relative_error(res.nu, *opt.exact_nu, sys.config(), Normalisation::Theorem);
}

}  // namespace

const char* to_string(MatvecMode m) { return m == MatvecMode::Direct ? "direct" : "hierarchical"; }

std::unique_ptr<SingleLayerOperator> make_single_layer(const Configuration& config, int lmax,
                                                       const MatvecSpec& spec) {
  if (spec.mode == MatvecMode::Direct) return std::make_unique<DirectSingleLayer>(config, lmax);
  return std::make_unique<HierarchicalSingleLayer>(config, lmax, spec.far);
}

StrategyResult solve_gmres_strategy(const GalerkinSystem& sys, const StrategyOptions& opt) {
  StrategyResult res;
  res.solver = "gmres";
  KrylovOptions ko;
  ko.tol = opt.tol;
  ko.maxit = opt.maxit;
  if (sys.sign() == SignCase::Mixed) {
    // nu - ((kappa0-kappa)/kappa0)(l/r^3) V nu = (4 pi/kappa0) Q sigma_f on the full space
    res.outside_theory = true;
    const std::size_t n = sys.full_layout().size();
    LinearMap A{n, [&](const double* x, double* y) { sys.apply_A_star_scaled(x, y); }, false};
    CoeffVector f = sys.scaled_free_charge();
    if (opt.exact_nu)
      ko.observer = [&](int k, const std::vector<double>& x) {
        CoeffVector nu(sys.full_layout(), Representation::Expansion);
        nu.values() = x;
        double e = relative_error(nu, *opt.exact_nu, sys.config(), Normalisation::Theorem);
        if (int(res.error_history.size()) <= k) res.error_history.resize(k + 1, 0.0);
        res.error_history[k] = e;
        if (opt.error_target > 0 && e <= opt.error_target && !res.iterations_to_error)
          res.iterations_to_error = k;
        return false;
      };
    res.nu = CoeffVector(sys.full_layout(), Representation::Expansion);
    res.nu.values() = gmres(A, f.values(), ko, res.report);
    res.lambda = to_reduced(sys.single_layer().apply(res.nu));
    finish(sys, opt, res);
    return res;
  }
  CoeffVector b = sys.rhs();
  LinearMap A{sys.dim(), [&](const double* x, double* y) { sys.apply_A_tilde(x, y); }, false};
  ErrorTracker tracker{sys, opt, res};
  if (opt.exact_nu) {
    tracker.record(0, std::vector<double>(sys.dim(), 0.0));
    ko.observer = [&](int k, const std::vector<double>& x) {
      tracker.record(k, x);
      return false;
    };
  }
  res.lambda = CoeffVector(sys.reduced_layout(), Representation::Projection);
  res.lambda.values() = gmres(A, b.values(), ko, res.report);
  res.nu = sys.reconstruct(res.lambda);
  if (opt.constants) res.report.bound_R_epsilon = iteration_bound_gmres(*opt.constants, sys.lmax(), opt.bound_epsilon);
  finish(sys, opt, res);
  return res;
}

StrategyResult solve_cg_strategy(const GalerkinSystem& sys, const StrategyOptions& opt) {
  if (sys.sign() == SignCase::Mixed)
    throw MixedSignError(
        "CG strategy needs all kappa_i on one side of kappa0: for mixed signs DtN^kappa is "
        "indefinite and has no square root");
  StrategyResult res;
  res.solver = "cg";
  const auto& dk = sys.dkappa();
  const std::size_t n = sys.dim();
  CoeffVector b = sys.rhs();
  std::vector<double> bs(n);
  for (std::size_t k = 0; k < n; ++k) bs[k] = dk[k] * b.data()[k];
  LinearMap A{n, [&](const double* x, double* y) { sys.apply_A_sym(x, y); }, true};
  KrylovOptions ko;
  ko.tol = opt.tol;
  ko.maxit = opt.maxit;
  ErrorTracker tracker{sys, opt, res};
  auto unscale = [&](const std::vector<double>& y) {
    std::vector<double> lam(n);
    for (std::size_t k = 0; k < n; ++k) lam[k] = y[k] / dk[k];
    return lam;
  };
  if (opt.exact_nu) {
    tracker.record(0, std::vector<double>(n, 0.0));
    ko.observer = [&](int k, const std::vector<double>& y) {
      tracker.record(k, unscale(y));
      return false;
    };
  }
  std::vector<double> y = cg(A, bs, ko, res.report);
  res.lambda = CoeffVector(sys.reduced_layout(), Representation::Projection);
  res.lambda.values() = unscale(y);
  res.nu = sys.reconstruct(res.lambda);
  if (opt.constants) res.report.bound_S_epsilon = iteration_bound_cg(*opt.constants, sys.lmax(), opt.bound_epsilon);
  finish(sys, opt, res);
  return res;
}

double relative_error(const CoeffVector& approx, const CoeffVector& reference,
                      const Configuration& config, Normalisation mode) {
  if (approx.space() != Space::Full || reference.space() != Space::Full ||
      approx.spheres() != reference.spheres() || reference.lmax() < approx.lmax())
    throw LayoutError("relative_error needs full-space vectors with reference degree >= approx degree");
  CoeffVector ref = to_expansion(truncate_Q(reference, approx.lmax()), config);
  CoeffVector diff = to_expansion(approx, config);
  for (std::size_t k = 0; k < diff.size(); ++k) diff.data()[k] -= ref.data()[k];
  double den;
  if (mode == Normalisation::Plain) {
    den = triple_norm_dual(ref, config);
  } else {
    CoeffVector q = free_charge_expansion(config, approx.lmax());
    den = triple_norm_dual(project_P0_perp(ref), config) +
          4.0 * std::numbers::pi / config.kappa0 * triple_norm_dual(project_P0_perp(q), config);
  }
  if (!(den > 0)) throw std::domain_error("zero normaliser in relative error");
  return triple_norm_dual(diff, config) / den;
}

std::uint64_t config_digest(const Configuration& config, int lmax, double tol) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void* p, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t k = 0; k < n; ++k) {
      h ^= b[k];
      h *= 1099511628211ull;
    }
  };
  const char tag[] = "spherepol-reference-v1";
  mix(tag, sizeof(tag));
  std::uint64_t n = config.size();
  mix(&n, sizeof(n));
  for (const Sphere& s : config.spheres) {
    double v[] = {s.center.x, s.center.y, s.center.z, s.radius, s.kappa, s.charge};
    mix(v, sizeof(v));
  }
  mix(&config.kappa0, sizeof(double));
  mix(&lmax, sizeof(int));
  mix(&tol, sizeof(double));
  return h;
}

std::string reference_cache_dir() {
  const char* env = std::getenv("SPHEREPOL_CACHE_DIR");
  return env ? std::string(env) : std::string();
}

StrategyResult reference_solution(const Configuration& config, int lmax_ref, double tol, bool use_cache) {
  validate(config);
  const std::size_t dim = config.size() * std::size_t(sh_count(lmax_ref));
  if (dim > kReferenceDimLimit)
    throw std::length_error("reference solution dimension " + std::to_string(dim) + " exceeds the direct-mode limit");
  std::string dir = use_cache ? reference_cache_dir() : std::string();
  std::string stem;
  if (!dir.empty()) {
    std::ostringstream os;
    os << dir << "/ref-" << std::hex << config_digest(config, lmax_ref, tol);
    stem = os.str();
    if (std::filesystem::exists(stem + ".nu.bin") && std::filesystem::exists(stem + ".lambda.bin")) {
      StrategyResult res;
      res.solver = "reference";
      res.nu = read_solution(stem + ".nu.bin");
      res.lambda = read_solution(stem + ".lambda.bin");
      res.report.residual_history = {0.0};
      res.report.converged = true;
      return res;
    }
  }
  DirectSingleLayer V(config, lmax_ref);
  GalerkinSystem sys(V);
  StrategyOptions opt;
  opt.tol = tol;
  opt.maxit = 2000;
  StrategyResult res = solve_gmres_strategy(sys, opt);
  res.solver = "reference";
  if (!stem.empty()) {
    std::filesystem::create_directories(dir);
    write_solution(stem + ".nu.bin", res.nu);
    write_solution(stem + ".lambda.bin", res.lambda);
  }
  return res;
}

}  // namespace spherepol
