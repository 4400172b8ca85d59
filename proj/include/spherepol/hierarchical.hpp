#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "spherepol/single_layer.hpp"

namespace spherepol {

struct FarFieldParams {
  // expansion degree of the box expansions
  int P = 10;
  // leaves at level D of the octree (root is level 0); 0 when the leaf cap drives the depth
  int D = 0;
  // smallest depth with at most this many spheres per leaf; 0 when D is given
  int max_particles_per_leaf = 0;
};

// Raised for inconsistent far-field parameters.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Uniform octree over the sphere centres. Boxes are addressed per level by
// integer coordinates in [0, 2^level)^3; only non-empty boxes are stored.
class Octree {
 public:
  using Coord = std::array<int, 3>;

  Octree(const Configuration& config, const FarFieldParams& params);

  int depth() const { return depth_; }
  Vec3 root_center() const { return center_; }
  double root_width() const { return width_; }
  Vec3 box_center(int level, const Coord& c) const;

  // non-empty boxes of a level
  const std::vector<Coord>& boxes(int level) const { return levels_[level].coords; }
  int box_index(int level, const Coord& c) const;  // -1 if empty
  // leaf box index of each sphere, and the spheres of each leaf
  const std::vector<int>& leaf_of() const { return leaf_of_; }
  const std::vector<std::vector<std::uint32_t>>& leaf_spheres() const { return leaf_spheres_; }
  std::size_t max_leaf_occupancy() const;

  static bool adjacent(const Coord& a, const Coord& b);

 private:
  struct Level {
    std::vector<Coord> coords;
    std::unordered_map<std::uint64_t, int> index;
  };
  static std::uint64_t key(const Coord& c);
  Coord leaf_coord(const Vec3& x, int level) const;
  void build(const Configuration& config, int depth);

  Vec3 center_;
  double width_ = 1.0;
  int depth_ = 1;
  std::vector<Level> levels_;
  std::vector<int> leaf_of_;
  std::vector<std::vector<std::uint32_t>> leaf_spheres_;
};

// Depth chosen by build rules: params.D, or the smallest D >= 1 meeting the leaf cap.
int tree_depth(const Configuration& config, const FarFieldParams& params);

// Single-layer operator with near-field pairs (same or adjacent leaves) applied
// exactly and the far field through the octree with degree-P expansions.
class HierarchicalSingleLayer : public SingleLayerOperator {
 public:
  static constexpr std::size_t kDefaultCacheBytes = std::size_t(512) << 20;

  HierarchicalSingleLayer(const Configuration& config, int lmax, const FarFieldParams& params,
                          std::size_t cache_budget_bytes = kDefaultCacheBytes);

  const Octree& tree() const { return tree_; }
  const FarFieldParams& params() const { return params_; }
  std::size_t near_pairs() const { return near_ ? near_->link_count() : 0; }

 protected:
  void apply_cross(const double* u, double* w) const override;

 private:
  FarFieldParams params_;
  Octree tree_;
  std::unique_ptr<GroupedTransfer> near_;
  // level-indexed far-field stages; entries below level 2 are unused
  std::unique_ptr<GroupedTransfer> sphere_to_leaf_, leaf_to_sphere_;
  std::vector<std::unique_ptr<GroupedTransfer>> upward_, m2l_, downward_;
};

}  // namespace spherepol
