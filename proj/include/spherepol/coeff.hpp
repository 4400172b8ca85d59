#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "spherepol/geometry.hpp"
#include "spherepol/harmonics.hpp"

namespace spherepol {

// Full: degrees 0..lmax per sphere. Reduced: degrees 1..lmax (means removed).
enum class Space { Full, Reduced };
// Expansion: coefficients of the unit-sphere harmonics Y_lm((x - x_i)/r_i).
// Projection: L2 pairings (u, Y^i_lm) over the sphere surface, i.e. r_i^2 times
// the expansion coefficients.
enum class Representation { Expansion, Projection };

const char* to_string(Space s);
const char* to_string(Representation r);

class LayoutError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Layout {
  std::size_t spheres = 0;
  int lmax = 0;
  Space space = Space::Full;

  int per_sphere() const { return sh_count(lmax) - (space == Space::Reduced ? 1 : 0); }
  std::size_t size() const { return spheres * std::size_t(per_sphere()); }
  int first_degree() const { return space == Space::Reduced ? 1 : 0; }
  std::size_t offset(std::size_t i, int l, int m) const {
    return i * per_sphere() + sh_index(l, m) - (space == Space::Reduced ? 1 : 0);
  }
  bool operator==(const Layout&) const = default;
};

// Flat coefficients ordered by sphere, then l, then m.
class CoeffVector {
 public:
  CoeffVector() = default;
  CoeffVector(std::size_t spheres, int lmax, Space space, Representation rep);
  CoeffVector(Layout layout, Representation rep);

  const Layout& layout() const { return layout_; }
  std::size_t spheres() const { return layout_.spheres; }
  int lmax() const { return layout_.lmax; }
  Space space() const { return layout_.space; }
  Representation representation() const { return rep_; }
  std::size_t size() const { return values_.size(); }

  double& at(std::size_t i, int l, int m);
  double at(std::size_t i, int l, int m) const;
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

 private:
  Layout layout_;
  Representation rep_ = Representation::Expansion;
  std::vector<double> values_;
};

// Exact r_i^2 rescaling between representations.
CoeffVector to_projection(const CoeffVector& x, const Configuration& config);
CoeffVector to_expansion(const CoeffVector& x, const Configuration& config);

// Reduced -> full inserts zero means; full -> reduced drops them.
CoeffVector to_full(const CoeffVector& x);
CoeffVector to_reduced(const CoeffVector& x);

// Full space only. P0 keeps the l = 0 entries, P0_perp zeroes them.
CoeffVector project_P0(const CoeffVector& x);
CoeffVector project_P0_perp(const CoeffVector& x);
// Drops degrees above lmax, or pads with zeros when lmax exceeds the input degree.
CoeffVector truncate_Q(const CoeffVector& x, int lmax);

// Per-sphere mean-free free charge as full-space expansion coefficients:
// only the l = 0 entry, sigma_f * sqrt(4 pi), is nonzero.
CoeffVector free_charge_expansion(const Configuration& config, int lmax);

}  // namespace spherepol
