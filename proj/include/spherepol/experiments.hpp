#pragma once

#include <ostream>
#include <stdexcept>
#include <vector>

#include "spherepol/config.hpp"
#include "spherepol/csv.hpp"

namespace spherepol {

// Raised when a cell would exceed the size limits of the requested mode.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDirectSphereLimit = 2000;
// residual tolerance of the "exact" discrete solutions used for error counting
inline constexpr double kExactTolerance = 1e-13;
// residual tolerance of the pure discrete solutions in the fmm study
inline constexpr double kPureDiscreteTolerance = 1e-10;

struct RunOptions {
  // number of independent cells evaluated concurrently
  int jobs = 1;
  // progress lines; null for silence
  std::ostream* log = nullptr;
};

// One sweep point: the configuration and degree it runs at.
struct Cell {
  double param = 0;
  Configuration config;
  int lmax = 0;
};

std::vector<Cell> expand_cells(const ExperimentSpec& spec);

// Runs every cell and returns the rows in canonical CSV order.
//
// Error counting (sweeps by default): each solver runs once to
// min(tol) * residual_factor while the theorem-normalised error against a
// kExactTolerance solve is tracked; each tolerance row reports the first
// iterate whose error reaches it (-1 when none does). Residual counting runs
// one solve per tolerance. wall_time_s covers the solver loop only, including
// any error tracking in that loop.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const RunOptions& opt = {});

}  // namespace spherepol
