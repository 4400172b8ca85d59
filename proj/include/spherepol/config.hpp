#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "spherepol/geometry.hpp"
#include "spherepol/strategies.hpp"

namespace spherepol {

// Schema violation; the message starts with the offending key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Solve, SweepN, SweepKappa, SweepRadii, SweepSeparation, SweepLmax, FmmStudy, Bench };

const char* to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);
const std::vector<ExperimentKind>& all_experiment_kinds();

enum class SolverMethod { Gmres, Cg };
const char* to_string(SolverMethod m);

// Either a lattice recipe or an explicit sphere list.
struct GeometrySpec {
  std::optional<std::array<int, 3>> lattice_dims;
  double edge = 2.5;
  std::vector<Species> species;
  Pattern pattern = Pattern::Alternating;
  std::vector<Sphere> spheres;
  double kappa0 = 1.0;

  bool operator==(const GeometrySpec&) const;
};

struct SolverSpec {
  std::vector<SolverMethod> methods{SolverMethod::Gmres};
  std::vector<double> tol{1e-8};
  int lmax = 5;
  // only the zero initial guess is supported
  std::string x0 = "zero";
  int maxit = 1000;
  double c_equiv = 1.0;

  bool operator==(const SolverSpec&) const = default;
};

// How iterations are counted in sweeps.
enum class CountMode { Residual, Error };

struct SweepSpec {
  std::vector<double> values;
  CountMode count = CountMode::Error;
  // residual tolerance = error target * residual_factor in error-counting mode
  double residual_factor = 0.01;
  // fmm-study grid
  std::vector<int> P;
  std::vector<int> D;
  int leaf_cap = 0;
  int lmax_ref = 20;

  bool operator==(const SweepSpec&) const = default;
};

struct MatvecConfig {
  MatvecMode mode = MatvecMode::Direct;
  int P = 10;
  int D = 0;
  int leaf_cap = 0;

  bool operator==(const MatvecConfig&) const = default;
  MatvecSpec to_spec() const;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Solve;
  GeometrySpec geometry;
  SolverSpec solver;
  MatvecConfig matvec;
  std::string output_path;
  // optional binary dump of the solve result
  std::string solution_path;
  SweepSpec sweep;

  bool operator==(const ExperimentSpec&) const = default;
};

ExperimentSpec parse_config(const nlohmann::json& j);
ExperimentSpec parse_config_text(const std::string& text);
ExperimentSpec parse_config_file(const std::string& path);
nlohmann::json emit_config(const ExperimentSpec& spec);

// Structural checks beyond the JSON schema (kind-specific fields, ranges).
void check_spec(const ExperimentSpec& spec);

Configuration build_configuration(const GeometrySpec& g);

}  // namespace spherepol
