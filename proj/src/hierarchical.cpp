#include "spherepol/hierarchical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace spherepol {

namespace {

constexpr int kMaxDepth = 10;

}  // namespace

std::uint64_t Octree::key(const Coord& c) {
  return (std::uint64_t(c[0]) << 42) | (std::uint64_t(c[1]) << 21) | std::uint64_t(c[2]);
}

bool Octree::adjacent(const Coord& a, const Coord& b) {
  return std::abs(a[0] - b[0]) <= 1 && std::abs(a[1] - b[1]) <= 1 && std::abs(a[2] - b[2]) <= 1;
}

Octree::Octree(const Configuration& config, const FarFieldParams& params) {
  if (config.size() == 0) throw GeometryError("octree over an empty configuration");
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi = -lo;
  double rmax = 0;
  for (const Sphere& s : config.spheres) {
    lo = {std::min(lo.x, s.center.x), std::min(lo.y, s.center.y), std::min(lo.z, s.center.z)};
    hi = {std::max(hi.x, s.center.x), std::max(hi.y, s.center.y), std::max(hi.z, s.center.z)};
    rmax = std::max(rmax, s.radius);
  }
  center_ = (lo + hi) * 0.5;
  double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
  if (!(extent > 0)) extent = 2.0 * rmax;
  // padding keeps the extreme centres off the cube faces
  width_ = 1.05 * extent;
  build(config, tree_depth(config, params));
}

Octree::Coord Octree::leaf_coord(const Vec3& x, int level) const {
  const int n = 1 << level;
  const double w = width_ / n;
  const Vec3 lo = center_ - Vec3{0.5 * width_, 0.5 * width_, 0.5 * width_};
  auto c = [&](double v, double l) { return std::clamp(int(std::floor((v - l) / w)), 0, n - 1); };
  return {c(x.x, lo.x), c(x.y, lo.y), c(x.z, lo.z)};
}

Vec3 Octree::box_center(int level, const Coord& c) const {
  const double w = width_ / (1 << level);
  const Vec3 lo = center_ - Vec3{0.5 * width_, 0.5 * width_, 0.5 * width_};
  return lo + Vec3{(c[0] + 0.5) * w, (c[1] + 0.5) * w, (c[2] + 0.5) * w};
}

int Octree::box_index(int level, const Coord& c) const {
  auto it = levels_[level].index.find(key(c));
  return it == levels_[level].index.end() ? -1 : it->second;
}

std::size_t Octree::max_leaf_occupancy() const {
  std::size_t m = 0;
  for (const auto& l : leaf_spheres_) m = std::max(m, l.size());
  return m;
}

void Octree::build(const Configuration& config, int depth) {
  depth_ = depth;
  levels_.assign(depth + 1, {});
  leaf_of_.assign(config.size(), -1);
  leaf_spheres_.clear();
  for (std::uint32_t i = 0; i < config.size(); ++i) {
    Coord c = leaf_coord(config.spheres[i].center, depth);
    for (int l = depth; l >= 0; --l) {
      Level& L = levels_[l];
      auto [it, fresh] = L.index.try_emplace(key(c), int(L.coords.size()));
      if (fresh) L.coords.push_back(c);
      if (l == depth) {
        if (fresh) leaf_spheres_.emplace_back();
        leaf_spheres_[it->second].push_back(i);
        leaf_of_[i] = it->second;
      }
      c = {c[0] >> 1, c[1] >> 1, c[2] >> 1};
    }
  }
}

int tree_depth(const Configuration& config, const FarFieldParams& params) {
  if (params.D > 0 && params.max_particles_per_leaf > 0)
    throw ParameterError("tree depth and leaf cap are mutually exclusive");
  if (params.D > 0) {
    if (params.D > kMaxDepth) throw ParameterError("tree depth above " + std::to_string(kMaxDepth));
    return params.D;
  }
  if (params.max_particles_per_leaf <= 0) throw ParameterError("either D or a leaf cap is required");
  for (int d = 1; d <= kMaxDepth; ++d) {
    FarFieldParams p;
    p.P = params.P;
    p.D = d;
    if (Octree(config, p).max_leaf_occupancy() <= std::size_t(params.max_particles_per_leaf)) return d;
  }
  return kMaxDepth;
}

HierarchicalSingleLayer::HierarchicalSingleLayer(const Configuration& config, int lmax,
                                                 const FarFieldParams& params,
                                                 std::size_t cache_budget_bytes)
    : SingleLayerOperator(config, lmax), params_(params), tree_(config, params) {
  if (params.P < 1) throw ParameterError("expansion degree P must be >= 1");
  params_.D = tree_.depth();
  const int D = tree_.depth(), P = params.P;
  const auto& leaf = tree_.leaf_of();
  const auto& leaves = tree_.boxes(D);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> near;
  for (std::uint32_t i = 0; i < config.size(); ++i)
    for (std::uint32_t j = 0; j < config.size(); ++j)
      if (i != j && Octree::adjacent(leaves[leaf[i]], leaves[leaf[j]])) near.emplace_back(i, j);
  near_ = std::make_unique<GroupedTransfer>(TransferKind::M2L, lmax, lmax,
                                            sphere_pair_links(config, near), cache_budget_bytes);
  if (D < 2) return;

  std::vector<GroupedTransfer::Link> up, down;
  for (std::uint32_t i = 0; i < config.size(); ++i) {
    Vec3 c = tree_.box_center(D, leaves[leaf[i]]);
    up.push_back({std::uint32_t(leaf[i]), i, config.spheres[i].center - c});
    down.push_back({i, std::uint32_t(leaf[i]), config.spheres[i].center - c});
  }
  sphere_to_leaf_ = std::make_unique<GroupedTransfer>(TransferKind::M2M, P, lmax, up, cache_budget_bytes);
  leaf_to_sphere_ = std::make_unique<GroupedTransfer>(TransferKind::L2L, lmax, P, down, cache_budget_bytes);

  upward_.resize(D);
  downward_.resize(D);
  m2l_.resize(D + 1);
  for (int level = 2; level <= D; ++level) {
    const auto& boxes = tree_.boxes(level);
    if (level < D) {
      // child (level + 1) <-> parent (level)
      std::vector<GroupedTransfer::Link> u, d;
      const auto& children = tree_.boxes(level + 1);
      for (std::uint32_t c = 0; c < children.size(); ++c) {
        Octree::Coord pc{children[c][0] >> 1, children[c][1] >> 1, children[c][2] >> 1};
        std::uint32_t p = tree_.box_index(level, pc);
        Vec3 shift = tree_.box_center(level + 1, children[c]) - tree_.box_center(level, pc);
        u.push_back({p, c, shift});
        d.push_back({c, p, shift});
      }
      upward_[level] = std::make_unique<GroupedTransfer>(TransferKind::M2M, P, P, u, cache_budget_bytes);
      downward_[level] = std::make_unique<GroupedTransfer>(TransferKind::L2L, P, P, d, cache_budget_bytes);
    }
    // interaction list: children of the parent's neighbours that are not adjacent
    std::vector<GroupedTransfer::Link> links;
    for (std::uint32_t b = 0; b < boxes.size(); ++b) {
      const auto& cb = boxes[b];
      Octree::Coord pb{cb[0] >> 1, cb[1] >> 1, cb[2] >> 1};
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dz = -1; dz <= 1; ++dz)
            for (int cx = 0; cx < 2; ++cx)
              for (int cy = 0; cy < 2; ++cy)
                for (int cz = 0; cz < 2; ++cz) {
                  Octree::Coord c{2 * (pb[0] + dx) + cx, 2 * (pb[1] + dy) + cy, 2 * (pb[2] + dz) + cz};
                  if (Octree::adjacent(c, cb)) continue;
                  const int n = 1 << level;
                  if (c[0] < 0 || c[1] < 0 || c[2] < 0 || c[0] >= n || c[1] >= n || c[2] >= n) continue;
                  int s = tree_.box_index(level, c);
                  if (s < 0) continue;
                  links.push_back({b, std::uint32_t(s), tree_.box_center(level, cb) - tree_.box_center(level, c)});
                }
    }
    m2l_[level] = std::make_unique<GroupedTransfer>(TransferKind::M2L, P, P, links, cache_budget_bytes);
  }
}

void HierarchicalSingleLayer::apply_cross(const double* u, double* w) const {
  near_->apply(u, w);
  const int D = tree_.depth();
  if (D < 2) return;
  const std::size_t Kp = sh_count(params_.P);
  std::vector<std::vector<double>> M(D + 1), L(D + 1);
  for (int level = 2; level <= D; ++level) {
    M[level].assign(tree_.boxes(level).size() * Kp, 0.0);
    L[level].assign(tree_.boxes(level).size() * Kp, 0.0);
  }
  sphere_to_leaf_->apply(u, M[D].data());
  for (int level = D - 1; level >= 2; --level) upward_[level]->apply(M[level + 1].data(), M[level].data());
  for (int level = 2; level <= D; ++level) m2l_[level]->apply(M[level].data(), L[level].data());
  for (int level = 2; level < D; ++level) downward_[level]->apply(L[level].data(), L[level + 1].data());
  leaf_to_sphere_->apply(L[D].data(), w);
}

}  // namespace spherepol
