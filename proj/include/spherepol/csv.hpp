#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace spherepol {

struct ResultRow {
  std::string kind;
  double param = 0;
  std::string solver;
  double tol = 0;
  int iterations = 0;
  // NaN when not computed
  double rel_error = 0;
  double rel_residual = 0;
  double wall_time_s = 0;
};

inline constexpr const char* kCsvHeader = "kind,param,solver,tol,iterations,rel_error,rel_residual,wall_time_s";

// Param ascending, then solver name, then tolerance descending.
void sort_rows(std::vector<ResultRow>& rows);

// Writes the header and the rows in canonical order. Throws std::invalid_argument
// for rows of mixed kinds.
void write_csv(std::ostream& out, std::vector<ResultRow> rows);
// Throws std::runtime_error on I/O failure.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

}  // namespace spherepol
