#include "spherepol/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace spherepol {

using nlohmann::json;

namespace {

const std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::Solve, "solve"},
    {ExperimentKind::SweepN, "sweep-n"},
    {ExperimentKind::SweepKappa, "sweep-kappa"},
    {ExperimentKind::SweepRadii, "sweep-radii"},
    {ExperimentKind::SweepSeparation, "sweep-separation"},
    {ExperimentKind::SweepLmax, "sweep-lmax"},
    {ExperimentKind::FmmStudy, "fmm-study"},
    {ExperimentKind::Bench, "bench"},
};

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) fail(path + "." + it.key(), "unknown key");
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double get_positive(const json& j, const std::string& path) {
  double v = get_number(j, path);
  if (!(v > 0)) fail(path, "must be positive");
  return v;
}

int get_int(const json& j, const std::string& path, int lo) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  long long v = j.get<long long>();
  if (v < lo || v > 1'000'000'000) fail(path, "must be >= " + std::to_string(lo));
  return int(v);
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

template <class F>
auto get_list(const json& j, const std::string& path, F&& item) {
  using T = decltype(item(j, path));
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<T> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(item(j[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

Species parse_species(const json& j, const std::string& path) {
  only_keys(j, path, {"radius", "kappa", "charge"});
  Species s;
  if (j.contains("radius")) s.radius = get_positive(j["radius"], path + ".radius");
  if (j.contains("kappa")) s.kappa = get_positive(j["kappa"], path + ".kappa");
  if (j.contains("charge")) s.charge = get_number(j["charge"], path + ".charge");
  return s;
}

Sphere parse_sphere(const json& j, const std::string& path) {
  only_keys(j, path, {"center", "radius", "kappa", "charge"});
  if (!j.contains("center")) fail(path + ".center", "missing");
  auto c = get_list(j["center"], path + ".center", get_number);
  if (c.size() != 3) fail(path + ".center", "expected three coordinates");
  Sphere s;
  s.center = {c[0], c[1], c[2]};
  if (j.contains("radius")) s.radius = get_positive(j["radius"], path + ".radius");
  if (j.contains("kappa")) s.kappa = get_positive(j["kappa"], path + ".kappa");
  if (j.contains("charge")) s.charge = get_number(j["charge"], path + ".charge");
  return s;
}

GeometrySpec parse_geometry(const json& j) {
  const std::string p = "geometry";
  only_keys(j, p, {"lattice_dims", "edge", "species", "pattern", "spheres", "kappa0"});
  GeometrySpec g;
  if (j.contains("kappa0")) g.kappa0 = get_positive(j["kappa0"], p + ".kappa0");
  bool lattice = j.contains("lattice_dims");
  if (lattice == j.contains("spheres")) fail(p, "exactly one of lattice_dims or spheres is required");
  if (lattice) {
    auto d = get_list(j["lattice_dims"], p + ".lattice_dims", [](const json& v, const std::string& q) { return get_int(v, q, 1); });
    if (d.size() != 3) fail(p + ".lattice_dims", "expected three integers");
    g.lattice_dims = std::array<int, 3>{d[0], d[1], d[2]};
    if (j.contains("edge")) g.edge = get_positive(j["edge"], p + ".edge");
    if (!j.contains("species")) fail(p + ".species", "missing");
    g.species = get_list(j["species"], p + ".species", parse_species);
    if (g.species.empty() || g.species.size() > 2) fail(p + ".species", "expected one or two species");
    if (j.contains("pattern")) {
      try {
        g.pattern = pattern_from_string(get_string(j["pattern"], p + ".pattern"));
      } catch (const std::invalid_argument& e) {
        fail(p + ".pattern", e.what());
      }
    }
  } else {
    for (const char* k : {"edge", "species", "pattern"})
      if (j.contains(k)) fail(p + "." + k, "only valid with lattice_dims");
    g.spheres = get_list(j["spheres"], p + ".spheres", parse_sphere);
    if (g.spheres.empty()) fail(p + ".spheres", "at least one sphere is required");
  }
  return g;
}

SolverMethod parse_method(const json& j, const std::string& path) {
  std::string s = get_string(j, path);
  if (s == "gmres") return SolverMethod::Gmres;
  if (s == "cg") return SolverMethod::Cg;
  fail(path, "unknown method '" + s + "' (gmres, cg)");
}

SolverSpec parse_solver(const json& j) {
  const std::string p = "solver";
  only_keys(j, p, {"method", "tol", "lmax", "x0", "maxit", "c_equiv"});
  SolverSpec s;
  if (j.contains("method")) {
    s.methods = j["method"].is_array() ? get_list(j["method"], p + ".method", parse_method)
                                       : std::vector<SolverMethod>{parse_method(j["method"], p + ".method")};
    if (s.methods.empty()) fail(p + ".method", "at least one method is required");
  }
  if (j.contains("tol")) {
    s.tol = j["tol"].is_array() ? get_list(j["tol"], p + ".tol", get_positive)
                                : std::vector<double>{get_positive(j["tol"], p + ".tol")};
    if (s.tol.empty()) fail(p + ".tol", "tolerance list must be non-empty");
  }
  if (j.contains("lmax")) s.lmax = get_int(j["lmax"], p + ".lmax", 1);
  if (s.lmax > kMaxDegree) fail(p + ".lmax", "exceeds the supported degree");
  if (j.contains("x0")) {
    s.x0 = get_string(j["x0"], p + ".x0");
    if (s.x0 != "zero") fail(p + ".x0", "only \"zero\" is supported");
  }
  if (j.contains("maxit")) s.maxit = get_int(j["maxit"], p + ".maxit", 1);
  if (j.contains("c_equiv")) s.c_equiv = get_positive(j["c_equiv"], p + ".c_equiv");
  return s;
}

MatvecConfig parse_matvec(const json& j) {
  const std::string p = "matvec";
  only_keys(j, p, {"mode", "P", "D", "leaf_cap"});
  MatvecConfig m;
  if (j.contains("mode")) {
    std::string s = get_string(j["mode"], p + ".mode");
    if (s == "direct") m.mode = MatvecMode::Direct;
    else if (s == "hierarchical") m.mode = MatvecMode::Hierarchical;
    else fail(p + ".mode", "unknown mode '" + s + "' (direct, hierarchical)");
  }
  if (m.mode == MatvecMode::Direct) {
    for (const char* k : {"P", "D", "leaf_cap"})
      if (j.contains(k)) fail(p + "." + k, "only valid in hierarchical mode");
    return m;
  }
  if (j.contains("P")) m.P = get_int(j["P"], p + ".P", 1);
  if (j.contains("D")) m.D = get_int(j["D"], p + ".D", 1);
  if (j.contains("leaf_cap")) m.leaf_cap = get_int(j["leaf_cap"], p + ".leaf_cap", 1);
  if (m.D > 0 && m.leaf_cap > 0) fail(p, "D and leaf_cap are mutually exclusive");
  if (m.D == 0 && m.leaf_cap == 0) fail(p, "hierarchical mode needs D or leaf_cap");
  return m;
}

SweepSpec parse_sweep(const json& j) {
  const std::string p = "sweep";
  only_keys(j, p, {"values", "count", "residual_factor", "P", "D", "leaf_cap", "lmax_ref"});
  SweepSpec s;
  if (j.contains("values")) s.values = get_list(j["values"], p + ".values", get_number);
  if (j.contains("count")) {
    std::string c = get_string(j["count"], p + ".count");
    if (c == "error") s.count = CountMode::Error;
    else if (c == "residual") s.count = CountMode::Residual;
    else fail(p + ".count", "unknown count mode '" + c + "' (error, residual)");
  }
  if (j.contains("residual_factor")) s.residual_factor = get_positive(j["residual_factor"], p + ".residual_factor");
  auto ints = [](const json& v, const std::string& q) { return get_int(v, q, 1); };
  if (j.contains("P")) s.P = get_list(j["P"], p + ".P", ints);
  if (j.contains("D")) s.D = get_list(j["D"], p + ".D", ints);
  if (j.contains("leaf_cap")) s.leaf_cap = get_int(j["leaf_cap"], p + ".leaf_cap", 1);
  if (j.contains("lmax_ref")) s.lmax_ref = get_int(j["lmax_ref"], p + ".lmax_ref", 1);
  return s;
}

json species_json(const Species& s) { return {{"radius", s.radius}, {"kappa", s.kappa}, {"charge", s.charge}}; }

}  // namespace

bool GeometrySpec::operator==(const GeometrySpec& o) const {
  auto same_species = [](const Species& a, const Species& b) {
    return a.radius == b.radius && a.kappa == b.kappa && a.charge == b.charge;
  };
  auto same_sphere = [](const Sphere& a, const Sphere& b) {
    return a.center.x == b.center.x && a.center.y == b.center.y && a.center.z == b.center.z &&
           a.radius == b.radius && a.kappa == b.kappa && a.charge == b.charge;
  };
  return lattice_dims == o.lattice_dims && edge == o.edge && pattern == o.pattern && kappa0 == o.kappa0 &&
         std::equal(species.begin(), species.end(), o.species.begin(), o.species.end(), same_species) &&
         std::equal(spheres.begin(), spheres.end(), o.spheres.begin(), o.spheres.end(), same_sphere);
}

const char* to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (const auto& [kind, name] : kKindNames)
    if (s == name) return kind;
  throw ConfigError("kind: unknown experiment kind '" + s + "'");
}

const std::vector<ExperimentKind>& all_experiment_kinds() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> v;
    for (const auto& kn : kKindNames) v.push_back(kn.first);
    return v;
  }();
  return kinds;
}

const char* to_string(SolverMethod m) { return m == SolverMethod::Gmres ? "gmres" : "cg"; }

MatvecSpec MatvecConfig::to_spec() const {
  MatvecSpec s;
  s.mode = mode;
  s.far.P = P;
  s.far.D = D;
  s.far.max_particles_per_leaf = leaf_cap;
  return s;
}

ExperimentSpec parse_config(const json& j) {
  only_keys(j, "$", {"kind", "geometry", "solver", "matvec", "output", "sweep"});
  ExperimentSpec s;
  if (!j.contains("kind")) fail("kind", "missing");
  s.kind = experiment_kind_from_string(get_string(j["kind"], "kind"));
  if (!j.contains("geometry")) fail("geometry", "missing");
  s.geometry = parse_geometry(j["geometry"]);
  if (j.contains("solver")) s.solver = parse_solver(j["solver"]);
  if (j.contains("matvec")) s.matvec = parse_matvec(j["matvec"]);
  if (j.contains("output")) {
    only_keys(j["output"], "output", {"path", "solution"});
    if (j["output"].contains("path")) s.output_path = get_string(j["output"]["path"], "output.path");
    if (j["output"].contains("solution")) s.solution_path = get_string(j["output"]["solution"], "output.solution");
  }
  if (j.contains("sweep")) s.sweep = parse_sweep(j["sweep"]);
  check_spec(s);
  return s;
}

ExperimentSpec parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("$: ") + e.what());
  }
  return parse_config(j);
}

ExperimentSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void check_spec(const ExperimentSpec& s) {
  const bool sweep = s.kind != ExperimentKind::Solve && s.kind != ExperimentKind::Bench;
  if ((sweep || s.kind == ExperimentKind::Bench) && s.sweep.values.empty())
    fail("sweep.values", std::string("required for ") + to_string(s.kind));
  if (!s.solution_path.empty() && s.kind != ExperimentKind::Solve)
    fail("output.solution", "only valid for solve");
  auto needs_lattice = [&](const char* why) {
    if (!s.geometry.lattice_dims) fail("geometry.lattice_dims", std::string("required for ") + why);
  };
  for (double v : s.sweep.values) {
    switch (s.kind) {
      case ExperimentKind::SweepN:
      case ExperimentKind::FmmStudy:
      case ExperimentKind::Bench:
        needs_lattice(to_string(s.kind));
        if (v < 1 || v != std::floor(v)) fail("sweep.values", "lattice sizes must be positive integers");
        break;
      case ExperimentKind::SweepLmax:
        if (v < 1 || v != std::floor(v) || v > kMaxDegree) fail("sweep.values", "degrees must be integers >= 1");
        break;
      case ExperimentKind::SweepKappa:
      case ExperimentKind::SweepRadii:
      case ExperimentKind::SweepSeparation:
        needs_lattice(to_string(s.kind));
        if (!(v > 0)) fail("sweep.values", "values must be positive");
        break;
      case ExperimentKind::Solve:
        break;
    }
  }
  if (s.kind == ExperimentKind::SweepKappa)
    for (double v : s.sweep.values)
      if (v == 1.0) fail("sweep.values", "kappa/kappa0 = 1 has no dielectric contrast");
  if (s.kind == ExperimentKind::SweepRadii)
    for (double v : s.sweep.values)
      if (v > 1.0) fail("sweep.values", "radius factors must lie in (0, 1]");
  if (s.kind == ExperimentKind::FmmStudy) {
    if (s.sweep.P.empty()) fail("sweep.P", "required for fmm-study");
    if (s.sweep.D.empty() && s.sweep.leaf_cap == 0) fail("sweep", "fmm-study needs D values or a leaf_cap");
    if (s.sweep.lmax_ref < s.solver.lmax) fail("sweep.lmax_ref", "must be at least solver.lmax");
  }
}

json emit_config(const ExperimentSpec& s) {
  json j;
  j["kind"] = to_string(s.kind);
  json g;
  g["kappa0"] = s.geometry.kappa0;
  if (s.geometry.lattice_dims) {
    const auto& d = *s.geometry.lattice_dims;
    g["lattice_dims"] = {d[0], d[1], d[2]};
    g["edge"] = s.geometry.edge;
    g["pattern"] = to_string(s.geometry.pattern);
    g["species"] = json::array();
    for (const Species& sp : s.geometry.species) g["species"].push_back(species_json(sp));
  } else {
    g["spheres"] = json::array();
    for (const Sphere& sp : s.geometry.spheres)
      g["spheres"].push_back({{"center", {sp.center.x, sp.center.y, sp.center.z}},
                              {"radius", sp.radius},
                              {"kappa", sp.kappa},
                              {"charge", sp.charge}});
  }
  j["geometry"] = g;
  json methods = json::array();
  for (SolverMethod m : s.solver.methods) methods.push_back(to_string(m));
  j["solver"] = {{"method", methods},
                 {"tol", s.solver.tol},
                 {"lmax", s.solver.lmax},
                 {"x0", s.solver.x0},
                 {"maxit", s.solver.maxit},
                 {"c_equiv", s.solver.c_equiv}};
  json m{{"mode", to_string(s.matvec.mode)}};
  if (s.matvec.mode == MatvecMode::Hierarchical) {
    m["P"] = s.matvec.P;
    if (s.matvec.D > 0) m["D"] = s.matvec.D;
    if (s.matvec.leaf_cap > 0) m["leaf_cap"] = s.matvec.leaf_cap;
  }
  j["matvec"] = m;
  json out = json::object();
  if (!s.output_path.empty()) out["path"] = s.output_path;
  if (!s.solution_path.empty()) out["solution"] = s.solution_path;
  j["output"] = out;
  json sw{{"values", s.sweep.values},
          {"count", s.sweep.count == CountMode::Error ? "error" : "residual"},
          {"residual_factor", s.sweep.residual_factor},
          {"P", s.sweep.P},
          {"D", s.sweep.D},
          {"lmax_ref", s.sweep.lmax_ref}};
  if (s.sweep.leaf_cap > 0) sw["leaf_cap"] = s.sweep.leaf_cap;
  j["sweep"] = sw;
  return j;
}

Configuration build_configuration(const GeometrySpec& g) {
  Configuration c;
  if (g.lattice_dims) {
    const auto& d = *g.lattice_dims;
    c = build_lattice(d[0], d[1], d[2], g.edge, g.species, g.pattern, g.kappa0);
  } else {
    c.spheres = g.spheres;
    c.kappa0 = g.kappa0;
  }
  validate(c);
  return c;
}

}  // namespace spherepol
