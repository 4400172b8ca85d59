#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "spherepol/coeff.hpp"
#include "spherepol/geometry.hpp"
#include "spherepol/translation.hpp"

namespace spherepol {

enum class TransferKind { M2L, M2M, L2L };

// Applies a fixed list of translations out[target] += T(shift) in[source]
// between real expansion slots (sh_count(target_degree) and
// sh_count(source_degree) entries per slot). Links whose shifts agree up to
// sign share one translation matrix, T(-d) = P_t T(d) P_s with P the degree
// parity, and are applied as a single matrix product.
class GroupedTransfer {
 public:
  struct Link {
    std::uint32_t target, source;
    Vec3 shift;
  };

  GroupedTransfer(TransferKind kind, int target_degree, int source_degree,
                  const std::vector<Link>& links, std::size_t cache_budget_bytes);

  void apply(const double* in, double* out) const;

  std::size_t group_count() const { return groups_.size(); }
  std::size_t link_count() const { return link_count_; }
  bool cached() const { return !cache_.empty() || groups_.empty(); }

 private:
  struct Group {
    Vec3 shift;
    // links with the representative shift first, then those with its negative
    std::vector<std::uint32_t> target, source;
    std::size_t n_plus = 0;
  };
  void translation(const Group& g, double* T) const;
  // T into scratch, its transpose into TT
  void translation_transposed(const Group& g, double* T, double* TT) const;

  TransferKind kind_;
  int pt_ = 0, ps_ = 0;
  std::size_t link_count_ = 0;
  std::vector<Group> groups_;
  std::vector<double> cache_;
};

// Links i <- j with shift x_i - x_j for multipole-to-local coupling of spheres.
std::vector<GroupedTransfer::Link> sphere_pair_links(const Configuration& config,
                                                     const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs);

// Galerkin single-layer operator on the full approximation space. Input is a
// full-space expansion vector, output the full-space projection vector
// (V Y^j_l'm', Y^i_lm) contracted with the input.
class SingleLayerOperator {
 public:
  SingleLayerOperator(const Configuration& config, int lmax);
  virtual ~SingleLayerOperator() = default;

  const Configuration& config() const { return config_; }
  int lmax() const { return lmax_; }
  Layout full_layout() const { return {config_.size(), lmax_, Space::Full}; }

  // y = V x on raw full-layout arrays; y is overwritten.
  void apply(const double* x, double* y) const;
  // Accepts full or reduced expansion vectors; returns the projection vector in
  // the same space (reduced means P0_perp V with zero means on input).
  CoeffVector apply(const CoeffVector& x) const;

 protected:
  // w += sum over j != i of T(x_i - x_j) u_j on multipole/local coefficients.
  virtual void apply_cross(const double* u, double* w) const = 0;

  Configuration config_;
  int lmax_;
  // per sphere, per degree: r^{l+2}/(2l+1) and r^{l+2}
  std::vector<double> source_scale_, target_scale_;
};

class DirectSingleLayer : public SingleLayerOperator {
 public:
  static constexpr std::size_t kDefaultCacheBytes = std::size_t(512) << 20;

  DirectSingleLayer(const Configuration& config, int lmax,
                    std::size_t cache_budget_bytes = kDefaultCacheBytes);

  const GroupedTransfer& pairs() const { return *pairs_; }

 protected:
  void apply_cross(const double* u, double* w) const override;

 private:
  std::unique_ptr<GroupedTransfer> pairs_;
};

// Dense matrix of V (row-major, full layout) by applying it to unit vectors.
std::vector<double> dense_matrix(const SingleLayerOperator& op);

// Dense V assembled block by block from translation_block (cross pairs) and
// the exact self blocks, or entirely by nested quadrature.
std::vector<double> assemble_dense_V(const Configuration& config, int lmax, BlockMethod method);

}  // namespace spherepol
