#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "spherepol/experiments.hpp"
#include "spherepol/kernels.hpp"

using namespace spherepol;
using nlohmann::json;

namespace {

// Defaults: 125 unit spheres, kappa 10, alternating unit charges, edge 2.5.
json default_config() {
  return json{{"geometry",
               {{"lattice_dims", {5, 5, 5}},
                {"edge", 2.5},
                {"species", {{{"radius", 1.0}, {"kappa", 10.0}, {"charge", 1.0}}}},
                {"pattern", "alternating"},
                {"kappa0", 1.0}}}};
}

struct Flags {
  std::string config;
  std::vector<int> lattice;
  double edge = 0, kappa0 = 0;
  std::string pattern;
  int lmax = 0, maxit = 0;
  std::vector<double> tol;
  std::vector<std::string> method;
  double c_equiv = 0;
  std::string matvec;
  int P = 0, D = 0, leaf_cap = 0;
  std::string output, solution;
  std::vector<double> values;
  std::string count;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool print_config = false;
};

void add_flags(CLI::App* app, Flags& f, bool config_required) {
  auto* c = app->add_option("-c,--config", f.config, "experiment configuration (JSON)");
  if (config_required) c->required()->check(CLI::ExistingFile);
  else c->check(CLI::ExistingFile);
  app->add_option("--lattice", f.lattice, "lattice dimensions nx ny nz")->expected(3);
  app->add_option("--edge", f.edge, "lattice edge length");
  app->add_option("--kappa0", f.kappa0, "background dielectric constant");
  app->add_option("--pattern", f.pattern, "alternating | striped");
  app->add_option("--lmax", f.lmax, "discretisation degree");
  app->add_option("--tol", f.tol, "tolerances");
  app->add_option("--method", f.method, "gmres and/or cg");
  app->add_option("--maxit", f.maxit, "iteration cap");
  app->add_option("--c-equiv", f.c_equiv, "norm-equivalence constant used in bounds");
  app->add_option("--matvec", f.matvec, "direct | hierarchical");
  app->add_option("--P", f.P, "far-field expansion degree");
  app->add_option("--D", f.D, "tree depth");
  app->add_option("--leaf-cap", f.leaf_cap, "maximum spheres per leaf");
  app->add_option("-o,--output", f.output, "CSV path (stdout when omitted)");
  app->add_option("--solution", f.solution, "binary solution path (solve only)");
  app->add_option("--values", f.values, "sweep values");
  app->add_option("--count", f.count, "error | residual");
  app->add_option("--seed", f.seed, "accepted for reproducibility records; all algorithms are deterministic");
  app->add_option("-j,--jobs", f.jobs, "cells evaluated concurrently")->check(CLI::PositiveNumber);
  app->add_flag("--print-config", f.print_config, "print the resolved configuration and exit");
}

json load(const Flags& f) {
  if (f.config.empty()) return default_config();
  std::ifstream in(f.config);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(f.config + ": " + e.what());
  }
}

void apply_flags(json& j, const Flags& f) {
  auto& g = j["geometry"];
  if (!f.lattice.empty()) g["lattice_dims"] = f.lattice;
  if (f.edge > 0) g["edge"] = f.edge;
  if (f.kappa0 > 0) g["kappa0"] = f.kappa0;
  if (!f.pattern.empty()) g["pattern"] = f.pattern;
  if (f.lmax > 0) j["solver"]["lmax"] = f.lmax;
  if (!f.tol.empty()) j["solver"]["tol"] = f.tol;
  if (!f.method.empty()) j["solver"]["method"] = f.method;
  if (f.maxit > 0) j["solver"]["maxit"] = f.maxit;
  if (f.c_equiv > 0) j["solver"]["c_equiv"] = f.c_equiv;
  if (!f.matvec.empty()) j["matvec"]["mode"] = f.matvec;
  if (f.P > 0) j["matvec"]["P"] = f.P;
  if (f.D > 0) {
    j["matvec"]["D"] = f.D;
    if (j["matvec"].contains("leaf_cap")) j["matvec"].erase("leaf_cap");
  }
  if (f.leaf_cap > 0) {
    j["matvec"]["leaf_cap"] = f.leaf_cap;
    if (j["matvec"].contains("D") && f.D == 0) j["matvec"].erase("D");
  }
  if (!f.output.empty()) j["output"]["path"] = f.output;
  if (!f.solution.empty()) j["output"]["solution"] = f.solution;
  if (!f.values.empty()) j["sweep"]["values"] = f.values;
  if (!f.count.empty()) j["sweep"]["count"] = f.count;
}

int execute(const ExperimentSpec& spec, const Flags& f) {
  if (f.print_config) {
    std::cout << emit_config(spec).dump(2) << '\n';
    return 0;
  }
  RunOptions opt;
  opt.jobs = f.jobs;
  opt.log = &std::cerr;
  std::cerr << "simd: " << kernels::to_string(kernels::active_isa()) << '\n';
  auto rows = run_experiment(spec, opt);
  if (spec.output_path.empty()) write_csv(std::cout, rows);
  else emit_csv(rows, spec.output_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarisation of dielectric spheres: Galerkin solvers and experiment drivers"};
  app.require_subcommand(1);
  std::vector<std::pair<CLI::App*, ExperimentKind>> kinds;
  Flags flags;
  for (ExperimentKind k : all_experiment_kinds()) {
    auto* sub = app.add_subcommand(to_string(k), std::string("run a ") + to_string(k) + " experiment");
    add_flags(sub, flags, false);
    kinds.emplace_back(sub, k);
  }
  auto* run = app.add_subcommand("run", "run the experiment described by a configuration file");
  add_flags(run, flags, true);
  std::string simd;
  app.add_option("--simd", simd, "kernel variant: scalar | avx2 | neon (overrides SPHEREPOL_SIMD)");
  CLI11_PARSE(app, argc, argv);
  try {
    if (!simd.empty()) {
      if (simd == "scalar") kernels::set_active_isa(kernels::Isa::Scalar);
      else if (simd == "avx2") kernels::set_active_isa(kernels::Isa::Avx2);
      else if (simd == "neon") kernels::set_active_isa(kernels::Isa::Neon);
      else throw std::invalid_argument("unknown --simd value '" + simd + "'");
    }
    json j = load(flags);
    for (auto& [sub, kind] : kinds)
      if (sub->parsed()) j["kind"] = to_string(kind);
    apply_flags(j, flags);
    return execute(parse_config(j), flags);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
