#include "spherepol/coeff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace spherepol {

namespace {

void require_spheres(const CoeffVector& x, const Configuration& config) {
  if (x.spheres() != config.size())
    throw LayoutError("coefficient vector has " + std::to_string(x.spheres()) +
                      " spheres, configuration has " + std::to_string(config.size()));
}

void require_full(const CoeffVector& x, const char* what) {
  if (x.space() != Space::Full) throw LayoutError(std::string(what) + " requires a full-space vector");
}

CoeffVector rescale(const CoeffVector& x, const Configuration& config, Representation to, int power) {
  require_spheres(x, config);
  CoeffVector y(x.layout(), to);
  const int K = x.layout().per_sphere();
  for (std::size_t i = 0; i < x.spheres(); ++i) {
    double s = std::pow(config.spheres[i].radius, power);
    for (int k = 0; k < K; ++k) y.data()[i * K + k] = s * x.data()[i * K + k];
  }
  return y;
}

}  // namespace

const char* to_string(Space s) { return s == Space::Full ? "full" : "reduced"; }
const char* to_string(Representation r) {
  return r == Representation::Expansion ? "expansion" : "projection";
}

CoeffVector::CoeffVector(std::size_t spheres, int lmax, Space space, Representation rep)
    : CoeffVector(Layout{spheres, lmax, space}, rep) {}

CoeffVector::CoeffVector(Layout layout, Representation rep) : layout_(layout), rep_(rep) {
  if (layout.lmax < 0 || layout.lmax > kMaxDegree) throw LayoutError("degree out of range");
  if (layout.space == Space::Reduced && layout.lmax < 1)
    throw LayoutError("reduced space needs lmax >= 1");
  values_.assign(layout.size(), 0.0);
}

double& CoeffVector::at(std::size_t i, int l, int m) {
  if (i >= spheres() || l < layout_.first_degree() || l > lmax() || std::abs(m) > l)
    throw LayoutError("coefficient index out of range");
  return values_[layout_.offset(i, l, m)];
}

double CoeffVector::at(std::size_t i, int l, int m) const {
  return const_cast<CoeffVector*>(this)->at(i, l, m);
}

CoeffVector to_projection(const CoeffVector& x, const Configuration& config) {
  if (x.representation() == Representation::Projection) return x;
  return rescale(x, config, Representation::Projection, 2);
}

CoeffVector to_expansion(const CoeffVector& x, const Configuration& config) {
  if (x.representation() == Representation::Expansion) return x;
  return rescale(x, config, Representation::Expansion, -2);
}

CoeffVector to_full(const CoeffVector& x) {
  if (x.space() == Space::Full) return x;
  CoeffVector y(x.spheres(), x.lmax(), Space::Full, x.representation());
  const int Kr = x.layout().per_sphere(), Kf = y.layout().per_sphere();
  for (std::size_t i = 0; i < x.spheres(); ++i)
    for (int k = 0; k < Kr; ++k) y.data()[i * Kf + k + 1] = x.data()[i * Kr + k];
  return y;
}

CoeffVector to_reduced(const CoeffVector& x) {
  if (x.space() == Space::Reduced) return x;
  CoeffVector y(x.spheres(), x.lmax(), Space::Reduced, x.representation());
  const int Kr = y.layout().per_sphere(), Kf = x.layout().per_sphere();
  for (std::size_t i = 0; i < x.spheres(); ++i)
    for (int k = 0; k < Kr; ++k) y.data()[i * Kr + k] = x.data()[i * Kf + k + 1];
  return y;
}

CoeffVector project_P0(const CoeffVector& x) {
  require_full(x, "P0");
  CoeffVector y(x.layout(), x.representation());
  for (std::size_t i = 0; i < x.spheres(); ++i) y.at(i, 0, 0) = x.at(i, 0, 0);
  return y;
}

CoeffVector project_P0_perp(const CoeffVector& x) {
  require_full(x, "P0_perp");
  CoeffVector y = x;
  for (std::size_t i = 0; i < x.spheres(); ++i) y.at(i, 0, 0) = 0.0;
  return y;
}

CoeffVector truncate_Q(const CoeffVector& x, int lmax) {
  CoeffVector y(x.spheres(), lmax, x.space(), x.representation());
  const int top = std::min(lmax, x.lmax());
  for (std::size_t i = 0; i < x.spheres(); ++i)
    for (int l = x.layout().first_degree(); l <= top; ++l)
      for (int m = -l; m <= l; ++m) y.at(i, l, m) = x.at(i, l, m);
  return y;
}

CoeffVector free_charge_expansion(const Configuration& config, int lmax) {
  CoeffVector q(config.size(), lmax, Space::Full, Representation::Expansion);
  const double s = std::sqrt(4.0 * std::numbers::pi);
  for (std::size_t i = 0; i < config.size(); ++i) q.at(i, 0, 0) = config.spheres[i].free_density() * s;
  return q;
}

}  // namespace spherepol
