#include "spherepol/translation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spherepol/harmonics.hpp"
#include "spherepol/solid.hpp"

namespace spherepol {

namespace {

constexpr int kPanelPoints = 20;

struct PanelRule {
  std::vector<double> x, w;
};

const PanelRule& panel_rule() {
  static const PanelRule rule = [] {
    PanelRule r;
    gauss_legendre(kPanelPoints, r.x, r.w);
    return r;
  }();
  return rule;
}

void frame(const Vec3& e, Vec3& e1, Vec3& e2) {
  Vec3 a = std::abs(e.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  e1 = a - e * a.dot(e);
  e1 = e1 * (1.0 / e1.norm());
  e2 = {e.y * e1.z - e.z * e1.y, e.z * e1.x - e.x * e1.z, e.x * e1.y - e.y * e1.x};
}

// Product rule on the unit sphere in a frame with polar axis e: Gauss-Legendre
// panels in theta, refined geometrically toward theta = 0 down to floor_angle,
// times nphi uniform azimuths. half_chord holds 2 sin(theta/2) per node.
struct GradedRule {
  std::vector<Vec3> nodes;
  std::vector<double> weights, half_chord;
};

GradedRule graded_rule(const Vec3& e, double floor_angle, int nphi) {
  Vec3 e1, e2;
  frame(e, e1, e2);
  std::vector<double> edges{std::numbers::pi};
  floor_angle = std::max(floor_angle, 1e-14);
  while (edges.back() > floor_angle && edges.size() < 60) edges.push_back(edges.back() * 0.35);
  edges.push_back(0.0);
  const auto& gx = panel_rule().x;
  const auto& gw = panel_rule().w;
  GradedRule g;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    double a = edges[p + 1], b = edges[p];
    for (int k = 0; k < kPanelPoints; ++k) {
      double th = 0.5 * (b - a) * gx[k] + 0.5 * (b + a);
      double wt = 0.5 * (b - a) * gw[k] * std::sin(th) * 2.0 * std::numbers::pi / nphi;
      double st = std::sin(th), ct = std::cos(th);
      for (int q = 0; q < nphi; ++q) {
        double ph = 2.0 * std::numbers::pi * q / nphi;
        Vec3 u = e1 * (st * std::cos(ph)) + e2 * (st * std::sin(ph)) + e * ct;
        g.nodes.push_back(u * (1.0 / u.norm()));
        g.weights.push_back(wt);
        g.half_chord.push_back(2.0 * std::sin(0.5 * th));
      }
    }
  }
  return g;
}

Vec3 direction_or_z(const Vec3& v) {
  double n = v.norm();
  return n > 0 ? v * (1.0 / n) : Vec3{0, 0, 1};
}

}  // namespace

void single_layer_potential_quadrature(const Sphere& source, int lmax, const Vec3& x, double* out) {
  const int K = sh_count(lmax);
  std::fill(out, out + K, 0.0);
  const double r = source.radius;
  Vec3 dx = x - source.center;
  double rho = dx.norm();
  double gap = std::abs(rho - r);
  // on the surface itself the kernel times the polar Jacobian is smooth
  double floor_angle = gap > 1e-12 * r ? 0.05 * gap / std::sqrt(rho * r) : 1.0;
  GradedRule g = graded_rule(direction_or_z(dx), floor_angle, 2 * lmax + 2);
  std::vector<double> y(K);
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    // rho^2 + r^2 - 2 rho r cos(theta), written to keep accuracy near coincidence
    double h = g.half_chord[n];
    double dist = std::sqrt((rho - r) * (rho - r) + rho * r * h * h);
    eval_real_sh_all(lmax, g.nodes[n], y.data());
    double f = g.weights[n] * r * r / (4.0 * std::numbers::pi * dist);
    for (int k = 0; k < K; ++k) out[k] += f * y[k];
  }
}

std::vector<double> single_layer_block_quadrature(const Sphere& source, const Sphere& target,
                                                  int lmax) {
  const int K = sh_count(lmax);
  Vec3 d = source.center - target.center;
  double gap = std::max(d.norm() - source.radius - target.radius, 0.0);
  // the outer integrand is steepest at the target point closest to the source,
  // and smooth when both surfaces coincide
  double floor_angle = d.norm() > 0 ? 0.05 * gap / std::sqrt(source.radius * target.radius) : 1.0;
  GradedRule g = graded_rule(direction_or_z(d), floor_angle, 2 * lmax + 2);
  std::vector<double> block(std::size_t(K) * K, 0.0), pot(K), y(K);
  const double rt2 = target.radius * target.radius;
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    Vec3 x = target.center + g.nodes[n] * target.radius;
    single_layer_potential_quadrature(source, lmax, x, pot.data());
    eval_real_sh_all(lmax, g.nodes[n], y.data());
    double w = g.weights[n] * rt2;
    for (int a = 0; a < K; ++a) {
      double wa = w * y[a];
      for (int b = 0; b < K; ++b) block[std::size_t(a) * K + b] += wa * pot[b];
    }
  }
  return block;
}

TranslationBlock translation_block(const Sphere& source, const Sphere& target, int lmax,
                                   BlockMethod method, std::size_t source_index,
                                   std::size_t target_index) {
  Vec3 d = target.center - source.center;
  if (!(d.norm() > source.radius + target.radius))
    throw GeometryError("translation block requested for intersecting spheres");
  TranslationBlock b;
  b.source = source_index;
  b.target = target_index;
  b.lmax = lmax;
  const int K = sh_count(lmax);
  if (method == BlockMethod::Quadrature) {
    b.entries = single_layer_block_quadrature(source, target, lmax);
    return b;
  }
  b.entries.resize(std::size_t(K) * K);
  m2l_real(d, lmax, lmax, b.entries.data());
  std::vector<double> rs(lmax + 1), rt(lmax + 1);
  for (int l = 0; l <= lmax; ++l) {
    rs[l] = std::pow(source.radius, l + 2) / (2.0 * l + 1.0);
    rt[l] = std::pow(target.radius, l + 2);
  }
  for (int a = 0; a < K; ++a) {
    int la = sh_from_index(a).l;
    for (int c = 0; c < K; ++c) b.entries[std::size_t(a) * K + c] *= rt[la] * rs[sh_from_index(c).l];
  }
  return b;
}

}  // namespace spherepol
