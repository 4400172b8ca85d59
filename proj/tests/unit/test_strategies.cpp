#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "spherepol/solution_io.hpp"
#include "spherepol/strategies.hpp"

using namespace spherepol;

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Configuration pair(double kappa, double q0 = 1.0, double q1 = 1.0) {
  Configuration c;
  c.spheres = {{{0, 0, 0}, 1, kappa, q0}, {{2.5, 0, 0}, 1, kappa, q1}};
  return c;
}

// Solution of the full-space equation A* nu = (4 pi/kappa0) R Q sigma_f by dense LU.
CoeffVector dense_full_solution(const GalerkinSystem& sys) {
  const std::size_t n = sys.full_layout().size();
  auto a = dense_operator(n, [&](const double* x, double* y) { sys.apply_A_star_full(x, y); });
  RowMat A = Eigen::Map<RowMat>(a.data(), n, n);
  CoeffVector b = sys.star_rhs();
  CoeffVector nu(sys.full_layout(), Representation::Expansion);
  Eigen::Map<Eigen::VectorXd>(nu.data(), n) = A.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), n));
  return nu;
}

double galerkin_residual(const GalerkinSystem& sys, const CoeffVector& nu) {
  CoeffVector r = apply_A_star_full(sys, nu), b = sys.star_rhs();
  for (std::size_t k = 0; k < r.size(); ++k) r.data()[k] -= b.data()[k];
  return triple_norm_dual(r, sys.config()) / triple_norm_dual(b, sys.config());
}

struct ScopedEnv {
  std::string name;
  ScopedEnv(const char* n, const std::string& v) : name(n) { setenv(n, v.c_str(), 1); }
  ~ScopedEnv() { unsetenv(name.c_str()); }
};

}  // namespace

TEST_CASE("GMRES strategy matches the dense full-space solve") {
  Configuration c = pair(10.0);
  DirectSingleLayer V(c, 3);
  GalerkinSystem sys(V);
  StrategyOptions opt;
  opt.tol = 1e-12;
  StrategyResult r = solve_gmres_strategy(sys, opt);
  CHECK(r.report.converged);
  CHECK(r.report.iterations > 0);
  CHECK(relative_error(r.nu, dense_full_solution(sys), c, Normalisation::Plain) < 1e-10);
  CHECK(galerkin_residual(sys, r.nu) < 10 * opt.tol);

  StrategyResult s = solve_cg_strategy(sys, opt);
  CHECK(relative_error(s.nu, r.nu, c, Normalisation::Plain) < 1e-8);
}

TEST_CASE("zero free charge gives zero induced charge") {
  Configuration c = pair(10.0, 0.0, 0.0);
  DirectSingleLayer V(c, 3);
  GalerkinSystem sys(V);
  for (auto solve : {solve_gmres_strategy, solve_cg_strategy}) {
    StrategyResult r = solve(sys, {});
    CHECK(r.report.iterations == 0);
    for (double v : r.nu.values()) CHECK(v == 0.0);
  }
}

TEST_CASE("a single charged sphere is not polarised") {
  Configuration c;
  c.spheres = {{{1, 2, 3}, 1.4, 3.0, 2.0}};
  c.kappa0 = 2.0;
  DirectSingleLayer V(c, 4);
  GalerkinSystem sys(V);
  StrategyResult r = solve_gmres_strategy(sys, {});
  for (double v : r.lambda.values()) CHECK(v == 0.0);
  CoeffVector q = sys.scaled_free_charge();
  CHECK(r.nu.values() == q.values());
  CHECK(q.at(0, 0, 0) == doctest::Approx(4.0 * std::numbers::pi / 2.0 * c.spheres[0].free_density() *
                                         std::sqrt(4.0 * std::numbers::pi)));
  StrategyResult ref = reference_solution(c, 8, 1e-13, false);
  CoeffVector q8 = free_charge_expansion(c, 8);
  CHECK(ref.nu.at(0, 0, 0) == doctest::Approx(4.0 * std::numbers::pi / 2.0 * q8.at(0, 0, 0)));
  for (int l = 1; l <= 8; ++l)
    for (int m = -l; m <= l; ++m) CHECK(ref.nu.at(0, l, m) == 0.0);
}

TEST_CASE("both strategies agree on sign-uniform instances") {
  for (double kappa : {10.0, 0.2}) {
    Configuration c = build_lattice(3, 2, 2, 2.4, {{1.0, kappa, 1.0}, {0.5, kappa * 1.5, -2.0}}, Pattern::Alternating);
    DirectSingleLayer V(c, 4);
    GalerkinSystem sys(V);
    StrategyOptions opt;
    opt.tol = 1e-10;
    StrategyResult g = solve_gmres_strategy(sys, opt), h = solve_cg_strategy(sys, opt);
    CHECK(relative_error(h.nu, g.nu, c, Normalisation::Plain) < 10 * opt.tol);
    CHECK(galerkin_residual(sys, g.nu) < 10 * opt.tol);
    CHECK(galerkin_residual(sys, h.nu) < 10 * opt.tol);
    CHECK_FALSE(g.outside_theory);
  }
}

TEST_CASE("mixed-sign configurations use the flagged fallback") {
  Configuration c = pair(10.0, 1.0, -1.0);
  c.spheres[1].kappa = 0.3;
  DirectSingleLayer V(c, 3);
  GalerkinSystem sys(V);
  StrategyOptions opt;
  opt.tol = 1e-12;
  StrategyResult r = solve_gmres_strategy(sys, opt);
  CHECK(r.outside_theory);
  CHECK(relative_error(r.nu, dense_full_solution(sys), c, Normalisation::Plain) < 1e-10);
  CHECK_THROWS_AS(solve_cg_strategy(sys, opt), MixedSignError);
}

TEST_CASE("error tracking and iteration bounds") {
  Configuration c = build_lattice(2, 2, 2, 2.5, {{1.0, 10.0, 1.0}}, Pattern::Alternating);
  const int lmax = 4;
  DirectSingleLayer V(c, lmax);
  GalerkinSystem sys(V);
  StrategyOptions exact_opt;
  exact_opt.tol = 1e-13;
  CoeffVector exact = solve_gmres_strategy(sys, exact_opt).nu;
  TheoryConstants t = compute_theory_constants(c, 1.0, estimate_cV(V).value);
  for (bool use_cg : {false, true}) {
    StrategyOptions opt;
    opt.tol = 1e-10;
    opt.exact_nu = &exact;
    opt.error_target = 1e-8;
    opt.constants = t;
    opt.bound_epsilon = 1e-8;
    StrategyResult r = use_cg ? solve_cg_strategy(sys, opt) : solve_gmres_strategy(sys, opt);
    REQUIRE(r.iterations_to_error);
    CHECK(r.error_history.size() == std::size_t(r.report.iterations + 1));
    CHECK(r.error_history.front() > 0.1);
    CHECK(r.error_history[*r.iterations_to_error] <= 1e-8);
    CHECK(*r.theorem_normalised_error <= 1e-8);
    int bound = use_cg ? *r.report.bound_S_epsilon : *r.report.bound_R_epsilon;
    CHECK(*r.iterations_to_error <= bound);
  }
}

TEST_CASE("relative error normalisations") {
  Configuration c = pair(10.0);
  StrategyResult ref = reference_solution(c, 10, 1e-13, false);
  // the reference is truncated to the approximation degree before comparing
  CHECK(relative_error(truncate_Q(ref.nu, 5), ref.nu, c, Normalisation::Plain) == 0.0);
  CHECK(relative_error(ref.nu, ref.nu, c, Normalisation::Theorem) == 0.0);
  CoeffVector scaled = ref.nu;
  for (auto& v : scaled.values()) v *= 1.0 + 1e-3;
  CHECK(relative_error(scaled, ref.nu, c, Normalisation::Plain) == doctest::Approx(1e-3).epsilon(1e-9));
  CoeffVector zero(2, 3, Space::Full, Representation::Expansion);
  CHECK_THROWS_AS(relative_error(zero, zero, c, Normalisation::Plain), std::domain_error);
  CHECK_THROWS_AS(relative_error(ref.nu, truncate_Q(ref.nu, 3), c, Normalisation::Plain), LayoutError);
}

TEST_CASE("discretisation error decreases with degree") {
  Configuration c;
  c.spheres = {{{0, 0, 0}, 1, 10, 1}, {{2.2, 0.3, 0}, 0.8, 10, -1}, {{0.4, 2.3, 0.5}, 1.1, 10, 0.5}};
  StrategyResult ref = reference_solution(c, 20, 1e-13, false);
  auto err = [&](int lmax) {
    DirectSingleLayer V(c, lmax);
    StrategyOptions opt;
    opt.tol = 1e-13;
    return relative_error(solve_gmres_strategy(GalerkinSystem(V), opt).nu, ref.nu, c, Normalisation::Theorem);
  };
  double e5 = err(5), e10 = err(10);
  CHECK(e10 < e5);
  CHECK(e10 < 0.1 * e5);
}

TEST_CASE("reference solutions are cached bit-identically") {
  auto dir = std::filesystem::temp_directory_path() / "spherepol-test-cache";
  std::filesystem::remove_all(dir);
  ScopedEnv env("SPHEREPOL_CACHE_DIR", dir.string());
  Configuration c = pair(5.0, 1.0, -0.5);
  StrategyResult a = reference_solution(c, 6, 1e-13);
  CHECK(std::filesystem::exists(dir));
  StrategyResult b = reference_solution(c, 6, 1e-13);
  CHECK(a.nu.values() == b.nu.values());
  CHECK(a.lambda.values() == b.lambda.values());
  CHECK(b.report.iterations == 0);
  CHECK(config_digest(c, 6, 1e-13) != config_digest(c, 7, 1e-13));
  Configuration moved = c;
  moved.spheres[1].center.y += 1e-9;
  CHECK(config_digest(c, 6, 1e-13) != config_digest(moved, 6, 1e-13));
  std::filesystem::remove_all(dir);
}

TEST_CASE("solution files round-trip and reject corrupt input") {
  auto path = std::filesystem::temp_directory_path() / "spherepol-test-solution.bin";
  CoeffVector x(3, 4, Space::Reduced, Representation::Projection);
  for (std::size_t k = 0; k < x.size(); ++k) x.data()[k] = std::exp(-double(k)) - 0.3;
  write_solution(path.string(), x);
  CoeffVector y = read_solution(path.string());
  CHECK(y.values() == x.values());
  CHECK(y.layout() == x.layout());
  CHECK(y.representation() == x.representation());
  CHECK(std::filesystem::file_size(path) == 8 + 4 + 8 + 4 + 1 + 1 + 2 + 8 * x.size());
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
  CHECK_THROWS_AS(read_solution(path.string()), FormatError);
  std::filesystem::remove(path);
}

TEST_CASE("residual tracks error on a 125-sphere lattice") {
  Configuration c = build_lattice(5, 5, 5, 2.5, {{1.0, 10.0, 1.0}}, Pattern::Alternating);
  const int lmax = 4;
  DirectSingleLayer V(c, lmax);
  GalerkinSystem sys(V);
  StrategyOptions eo;
  eo.tol = 1e-13;
  CoeffVector exact = solve_gmres_strategy(sys, eo).nu;
  StrategyOptions opt;
  opt.tol = 1e-6;
  opt.exact_nu = &exact;
  StrategyResult r = solve_gmres_strategy(sys, opt);
  double ratio = r.relative_residual() / *r.theorem_normalised_error;
  CHECK(ratio > 1e-2);
  CHECK(ratio < 1e2);
}
