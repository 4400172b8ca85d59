#pragma once

#include <cstddef>
#include <vector>

#include "spherepol/geometry.hpp"

namespace spherepol {

enum class BlockMethod { Analytic, Quadrature };

// Dense pairing (S Y^j_{l'm'}, Y^i_{lm})_{L2(surface i)}: rows are target
// (l, m), columns source (l', m'), both in sh_index order.
struct TranslationBlock {
  std::size_t source = 0;
  std::size_t target = 0;
  int lmax = 0;
  std::vector<double> entries;

  int size() const { return (lmax + 1) * (lmax + 1); }
  double operator()(int row, int col) const { return entries[std::size_t(row) * size() + col]; }
};

// The analytic path re-expands the exterior field of each source harmonic,
// r_j^{l'+2}/(2l'+1) Y(x)/|x|^{l'+1}, about the target centre.
TranslationBlock translation_block(const Sphere& source, const Sphere& target, int lmax,
                                   BlockMethod method, std::size_t source_index = 0, std::size_t target_index = 0);

// Nested quadrature for the same pairing, also valid when source and target
// are the same sphere. Both rules use polar panels graded toward the nearest
// point of the other surface: the outer one about the axis between the
// centres, the inner one about the direction of the current target point.
std::vector<double> single_layer_block_quadrature(const Sphere& source, const Sphere& target,
                                                  int lmax);

// Potential (1/(4 pi)) int Y^j_lm(y)/|x - y| dS(y) for all lm at a point x.
void single_layer_potential_quadrature(const Sphere& source, int lmax, const Vec3& x, double* out);

}  // namespace spherepol
