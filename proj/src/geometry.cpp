#include "spherepol/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace spherepol {

double Sphere::free_density() const {
  return charge / (4.0 * std::numbers::pi * radius * radius);
}

const char* to_string(SignCase s) {
  switch (s) {
    case SignCase::AllGreater: return "all-greater";
    case SignCase::AllLess: return "all-less";
    case SignCase::Mixed: return "mixed";
  }
  return "?";
}

const char* to_string(Pattern p) {
  return p == Pattern::Alternating ? "alternating" : "striped";
}

Pattern pattern_from_string(const std::string& s) {
  if (s == "alternating") return Pattern::Alternating;
  if (s == "striped") return Pattern::Striped;
  throw std::invalid_argument("unknown lattice pattern '" + s + "'");
}

Configuration build_lattice(int nx, int ny, int nz, double edge,
                            const std::vector<Species>& species, Pattern pattern,
                            double kappa0) {
  if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("lattice dimensions must be >= 1");
  if (species.empty()) throw std::invalid_argument("lattice needs at least one species");
  std::size_t n = std::size_t(nx) * ny * nz;
  Configuration c;
  c.kappa0 = kappa0;
  c.spheres.reserve(n);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        int parity = (pattern == Pattern::Alternating ? i + j + k : k) % 2;
        Sphere s;
        s.center = {i * edge, j * edge, k * edge};
        if (species.size() == 1) {
          s.radius = species[0].radius;
          s.kappa = species[0].kappa;
          s.charge = parity ? -species[0].charge : species[0].charge;
        } else {
          const Species& sp = species[parity % species.size()];
          s.radius = sp.radius;
          s.kappa = sp.kappa;
          s.charge = sp.charge;
        }
        c.spheres.push_back(s);
      }
  if (n > 1 && !(min_separation(c) > 0))
    throw GeometryError("lattice edge " + std::to_string(edge) + " too small for the species radii");
  return c;
}

double min_separation(const Configuration& config) {
  double best = std::numeric_limits<double>::infinity();
  const auto& s = config.spheres;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      best = std::min(best, (s[i].center - s[j].center).norm() - s[i].radius - s[j].radius);
  return best;
}

SignCase sign_case(const Configuration& config) {
  bool above = false, below = false;
  for (const auto& s : config.spheres) {
    if (s.kappa > config.kappa0) above = true;
    if (s.kappa < config.kappa0) below = true;
  }
  if (above && below) return SignCase::Mixed;
  return below ? SignCase::AllLess : SignCase::AllGreater;
}

AssumptionReport validate(const Configuration& config) {
  if (config.spheres.empty()) throw GeometryError("configuration has no spheres");
  if (!(config.kappa0 > 0)) throw GeometryError("kappa0 must be positive");
  AssumptionReport r;
  r.min_radius = r.min_kappa = std::numeric_limits<double>::infinity();
  r.max_radius = r.max_kappa = 0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    const Sphere& s = config.spheres[i];
    if (!(s.radius > 0)) throw GeometryError("sphere " + std::to_string(i) + ": radius must be positive");
    if (!(s.kappa > 0)) throw GeometryError("sphere " + std::to_string(i) + ": kappa must be positive");
    if (s.kappa == config.kappa0)
      throw GeometryError("sphere " + std::to_string(i) + ": kappa equals kappa0");
    r.min_radius = std::min(r.min_radius, s.radius);
    r.max_radius = std::max(r.max_radius, s.radius);
    r.min_kappa = std::min(r.min_kappa, s.kappa);
    r.max_kappa = std::max(r.max_kappa, s.kappa);
  }
  r.min_separation = std::numeric_limits<double>::infinity();
  const auto& s = config.spheres;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      double gap = (s[i].center - s[j].center).norm() - s[i].radius - s[j].radius;
      if (!(gap > 0))
        throw GeometryError("spheres " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
      r.min_separation = std::min(r.min_separation, gap);
    }
  r.sign_uniform = sign_case(config);
  return r;
}

}  // namespace spherepol
