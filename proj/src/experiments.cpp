#include "spherepol/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <mutex>
#include <string>

#include "spherepol/solution_io.hpp"

namespace spherepol {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Logger {
 public:
  explicit Logger(std::ostream* out) : out_(out) {}
  template <class... T>
  void operator()(const T&... parts) {
    if (!out_) return;
    std::lock_guard<std::mutex> lock(mu_);
    ((*out_) << ... << parts) << std::endl;
  }

 private:
  std::ostream* out_;
  std::mutex mu_;
};

std::array<int, 3> cube(double n) {
  int k = int(n);
  return {k, k, k};
}

void guard(const ExperimentSpec& spec, const Cell& c) {
  if (spec.matvec.mode == MatvecMode::Direct && c.config.size() > kDirectSphereLimit)
    throw ResourceError("direct mode is limited to " + std::to_string(kDirectSphereLimit) + " spheres, cell has " +
                        std::to_string(c.config.size()) + "; use hierarchical mode");
}

StrategyResult run_method(SolverMethod m, const GalerkinSystem& sys, const StrategyOptions& o) {
  return m == SolverMethod::Gmres ? solve_gmres_strategy(sys, o) : solve_cg_strategy(sys, o);
}

std::vector<ResultRow> run_sweep_cell(const ExperimentSpec& spec, const Cell& cell, Logger& log) {
  guard(spec, cell);
  const char* kind = to_string(spec.kind);
  auto V = make_single_layer(cell.config, cell.lmax, spec.matvec.to_spec());
  GalerkinSystem sys(*V);
  const bool want_error = spec.kind != ExperimentKind::Bench && spec.kind != ExperimentKind::Solve;
  CoeffVector exact;
  if (want_error) {
    StrategyOptions eo;
    eo.tol = kExactTolerance;
    eo.maxit = std::max(spec.solver.maxit, 2000);
    exact = solve_gmres_strategy(sys, eo).nu;
  }
  std::vector<ResultRow> rows;
  for (SolverMethod m : spec.solver.methods) {
    if (want_error && spec.sweep.count == CountMode::Error) {
      StrategyOptions o;
      o.tol = *std::min_element(spec.solver.tol.begin(), spec.solver.tol.end()) * spec.sweep.residual_factor;
      o.maxit = spec.solver.maxit;
      o.exact_nu = &exact;
      StrategyResult r = run_method(m, sys, o);
      for (double t : spec.solver.tol) {
        ResultRow row{kind, cell.param, to_string(m), t, -1, kNaN, kNaN, r.report.wall_time};
        for (std::size_t k = 0; k < r.error_history.size(); ++k)
          if (r.error_history[k] <= t) {
            row.iterations = int(k);
            row.rel_error = r.error_history[k];
            row.rel_residual = r.report.residual_history[k];
            break;
          }
        rows.push_back(row);
      }
    } else {
      for (double t : spec.solver.tol) {
        StrategyOptions o;
        o.tol = t;
        o.maxit = spec.solver.maxit;
        if (want_error) o.exact_nu = &exact;
        StrategyResult r = run_method(m, sys, o);
        if (spec.kind == ExperimentKind::Solve && !spec.solution_path.empty() && m == spec.solver.methods.front() &&
            t == *std::min_element(spec.solver.tol.begin(), spec.solver.tol.end()))
          write_solution(spec.solution_path, r.nu);
        rows.push_back({kind, cell.param, to_string(m), t, r.report.iterations,
                        r.theorem_normalised_error.value_or(kNaN), r.relative_residual(), r.report.wall_time});
      }
    }
  }
  log(kind, " param=", cell.param, " N=", cell.config.size(), " lmax=", cell.lmax, " done");
  return rows;
}

std::vector<ResultRow> run_fmm_cell(const ExperimentSpec& spec, const Cell& cell, Logger& log) {
  const char* kind = to_string(spec.kind);
  if (cell.config.size() > kDirectSphereLimit)
    throw ResourceError("fmm-study needs the direct oracle, limited to " + std::to_string(kDirectSphereLimit) +
                        " spheres");
  const double tol = kPureDiscreteTolerance;
  DirectSingleLayer Vd(cell.config, cell.lmax);
  GalerkinSystem sd(Vd);
  StrategyOptions o;
  o.tol = tol;
  o.maxit = spec.solver.maxit;
  StrategyResult discrete = solve_gmres_strategy(sd, o);
  StrategyResult ref = reference_solution(cell.config, spec.sweep.lmax_ref, kExactTolerance);
  std::vector<ResultRow> rows;
  rows.push_back({kind, cell.param, "discretisation", tol, discrete.report.iterations,
                  relative_error(discrete.nu, ref.nu, cell.config, Normalisation::Plain), discrete.relative_residual(),
                  discrete.report.wall_time});
  struct Tree {
    std::string label;
    FarFieldParams far;
  };
  std::vector<Tree> trees;
  for (int d : spec.sweep.D) trees.push_back({"D" + std::to_string(d), {0, d, 0}});
  if (spec.sweep.leaf_cap > 0)
    trees.push_back({"cap" + std::to_string(spec.sweep.leaf_cap), {0, 0, spec.sweep.leaf_cap}});
  for (const Tree& t : trees)
    for (int P : spec.sweep.P)
      for (SolverMethod m : spec.solver.methods) {
        FarFieldParams far = t.far;
        far.P = P;
        HierarchicalSingleLayer Vh(cell.config, cell.lmax, far);
        GalerkinSystem sh(Vh);
        StrategyResult r = run_method(m, sh, o);
        std::string name = std::string(to_string(m)) + "-" + t.label + "-P" + std::to_string(P);
        rows.push_back({kind, cell.param, name, tol, r.report.iterations,
                        relative_error(r.nu, discrete.nu, cell.config, Normalisation::Plain), r.relative_residual(),
                        r.report.wall_time});
      }
  log(kind, " N=", cell.config.size(), " done");
  return rows;
}

}  // namespace

std::vector<Cell> expand_cells(const ExperimentSpec& spec) {
  check_spec(spec);
  std::vector<Cell> cells;
  const int lmax = spec.solver.lmax;
  if (spec.kind == ExperimentKind::Solve) {
    Configuration c = build_configuration(spec.geometry);
    cells.push_back({double(c.size()), c, lmax});
    return cells;
  }
  for (double v : spec.sweep.values) {
    GeometrySpec g = spec.geometry;
    Cell cell{v, {}, lmax};
    switch (spec.kind) {
      case ExperimentKind::SweepN:
      case ExperimentKind::FmmStudy:
      case ExperimentKind::Bench:
        g.lattice_dims = cube(v);
        break;
      case ExperimentKind::SweepKappa:
        for (Species& s : g.species) s.kappa = v * g.kappa0;
        break;
      case ExperimentKind::SweepRadii: {
        // the second parity class shrinks to v times the first radius
        Species big = g.species[0];
        Species small = g.species.size() > 1 ? g.species[1] : Species{big.radius, big.kappa, -big.charge};
        small.radius = v * big.radius;
        g.species = {big, small};
        cell.param = 1.0 / v;
        break;
      }
      case ExperimentKind::SweepSeparation: {
        double r0 = g.species[0].radius, r1 = g.species.size() > 1 ? g.species[1].radius : r0;
        g.edge = v + r0 + r1;
        break;
      }
      case ExperimentKind::SweepLmax:
        cell.lmax = int(v);
        break;
      case ExperimentKind::Solve:
        break;
    }
    cell.config = build_configuration(g);
    if (spec.kind == ExperimentKind::SweepN || spec.kind == ExperimentKind::FmmStudy ||
        spec.kind == ExperimentKind::Bench)
      cell.param = double(cell.config.size());
    cells.push_back(std::move(cell));
  }
  return cells;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const RunOptions& opt) {
  std::vector<Cell> cells = expand_cells(spec);
  Logger log(opt.log);
  auto run_cell = [&](const Cell& c) {
    return spec.kind == ExperimentKind::FmmStudy ? run_fmm_cell(spec, c, log) : run_sweep_cell(spec, c, log);
  };
  for (const Cell& c : cells)
    if (spec.kind != ExperimentKind::FmmStudy) guard(spec, c);
  std::vector<ResultRow> rows;
  const std::size_t jobs = std::max(1, opt.jobs);
  for (std::size_t start = 0; start < cells.size(); start += jobs) {
    std::vector<std::future<std::vector<ResultRow>>> batch;
    for (std::size_t k = start; k < std::min(cells.size(), start + jobs); ++k)
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run_cell, std::cref(cells[k])));
    for (auto& f : batch) {
      auto part = f.get();
      rows.insert(rows.end(), part.begin(), part.end());
    }
  }
  sort_rows(rows);
  return rows;
}

}  // namespace spherepol
