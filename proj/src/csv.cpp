#include "spherepol/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace spherepol {

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.param != b.param) return a.param < b.param;
    if (a.solver != b.solver) return a.solver < b.solver;
    return a.tol > b.tol;
  });
}

void write_csv(std::ostream& out, std::vector<ResultRow> rows) {
  for (const ResultRow& r : rows)
    if (r.kind != rows.front().kind) throw std::invalid_argument("CSV rows mix experiment kinds");
  sort_rows(rows);
  out << kCsvHeader << '\n';
  for (const ResultRow& r : rows)
    out << r.kind << ',' << number(r.param) << ',' << r.solver << ',' << number(r.tol) << ',' << r.iterations << ','
        << number(r.rel_error) << ',' << number(r.rel_residual) << ',' << number(r.wall_time_s) << '\n';
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_csv(out, rows);
  out.flush();
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace spherepol
