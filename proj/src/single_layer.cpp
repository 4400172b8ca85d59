#include "spherepol/single_layer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "spherepol/kernels.hpp"
#include "spherepol/solid.hpp"
#include "spherepol/translation.hpp"

namespace spherepol {

namespace {

using Key = std::array<long long, 3>;

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = 1469598103934665603ull;
    for (long long v : k) {
      h ^= std::hash<long long>()(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

constexpr int kColumnChunk = 128;

std::vector<double> degree_parity(int lmax) {
  std::vector<double> p(sh_count(lmax));
  for (int k = 0; k < sh_count(lmax); ++k) p[k] = (sh_from_index(k).l & 1) ? -1.0 : 1.0;
  return p;
}

}  // namespace

GroupedTransfer::GroupedTransfer(TransferKind kind, int target_degree, int source_degree,
                                 const std::vector<Link>& links, std::size_t cache_budget_bytes)
    : kind_(kind), pt_(target_degree), ps_(source_degree), link_count_(links.size()) {
  double extent = 1e-300;
  for (const Link& l : links)
    extent = std::max({extent, std::abs(l.shift.x), std::abs(l.shift.y), std::abs(l.shift.z)});
  // shifts closer than a few ulps of the largest one share a translation
  const double quantum = extent * std::ldexp(1.0, -46);
  std::unordered_map<Key, std::size_t, KeyHash> index;
  std::vector<std::vector<const Link*>> plus, minus;
  for (const Link& l : links) {
    const Vec3& d = l.shift;
    Key k{std::llround(d.x / quantum), std::llround(d.y / quantum), std::llround(d.z / quantum)};
    bool neg = k < Key{0, 0, 0};
    if (neg) k = {-k[0], -k[1], -k[2]};
    auto [it, fresh] = index.try_emplace(k, groups_.size());
    if (fresh) {
      groups_.push_back({neg ? -d : d, {}, {}, 0});
      plus.emplace_back();
      minus.emplace_back();
    }
    (neg ? minus : plus)[it->second].push_back(&l);
  }
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    Group& G = groups_[g];
    for (const auto* list : {&plus[g], &minus[g]})
      for (const Link* l : *list) {
        G.target.push_back(l->target);
        G.source.push_back(l->source);
      }
    G.n_plus = plus[g].size();
  }
  const std::size_t size = std::size_t(sh_count(pt_)) * sh_count(ps_);
  if (groups_.size() * size * sizeof(double) <= cache_budget_bytes) {
    cache_.resize(groups_.size() * size);
    std::vector<double> T(size);
    for (std::size_t g = 0; g < groups_.size(); ++g) translation_transposed(groups_[g], T.data(), cache_.data() + g * size);
  }
}

void GroupedTransfer::translation_transposed(const Group& g, double* T, double* TT) const {
  translation(g, T);
  const int Kt = sh_count(pt_), Ks = sh_count(ps_);
  for (int a = 0; a < Kt; ++a)
    for (int b = 0; b < Ks; ++b) TT[std::size_t(b) * Kt + a] = T[std::size_t(a) * Ks + b];
}

void GroupedTransfer::translation(const Group& g, double* T) const {
  switch (kind_) {
    case TransferKind::M2L: m2l_real(g.shift, pt_, ps_, T); break;
    case TransferKind::M2M: m2m_real(g.shift, pt_, ps_, T); break;
    case TransferKind::L2L: l2l_real(g.shift, pt_, ps_, T); break;
  }
}

void GroupedTransfer::apply(const double* in, double* out) const {
  const int Kt = sh_count(pt_), Ks = sh_count(ps_);
  const std::size_t size = std::size_t(Kt) * Ks;
  const std::vector<double> par_t = degree_parity(pt_), par_s = degree_parity(ps_);
  std::vector<double> scratch(cache_.empty() ? 2 * size : 0);
  // rows are links: W (links x Kt) = U (links x Ks) * T^T, so gathers and scatters are contiguous
  std::vector<double> U(std::size_t(Ks) * kColumnChunk), W(std::size_t(Kt) * kColumnChunk);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const Group& G = groups_[g];
    const double* TT;
    if (cache_.empty()) {
      translation_transposed(G, scratch.data(), scratch.data() + size);
      TT = scratch.data() + size;
    } else {
      TT = cache_.data() + g * size;
    }
    const std::size_t nrows = G.target.size();
    for (std::size_t r0 = 0; r0 < nrows; r0 += kColumnChunk) {
      const int nr = int(std::min<std::size_t>(kColumnChunk, nrows - r0));
      for (int r = 0; r < nr; ++r) {
        const double* src = in + std::size_t(G.source[r0 + r]) * Ks;
        double* u = U.data() + std::size_t(r) * Ks;
        if (r0 + r < G.n_plus) std::copy(src, src + Ks, u);
        else for (int k = 0; k < Ks; ++k) u[k] = par_s[k] * src[k];
      }
      std::fill(W.begin(), W.begin() + std::size_t(Kt) * nr, 0.0);
      kernels::gemm_acc(nr, Kt, Ks, U.data(), Ks, TT, Kt, W.data(), Kt);
      for (int r = 0; r < nr; ++r) {
        double* dst = out + std::size_t(G.target[r0 + r]) * Kt;
        const double* w = W.data() + std::size_t(r) * Kt;
        if (r0 + r < G.n_plus) for (int k = 0; k < Kt; ++k) dst[k] += w[k];
        else for (int k = 0; k < Kt; ++k) dst[k] += par_t[k] * w[k];
      }
    }
  }
}

std::vector<GroupedTransfer::Link> sphere_pair_links(
    const Configuration& config, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs) {
  std::vector<GroupedTransfer::Link> links;
  links.reserve(pairs.size());
  for (auto [i, j] : pairs)
    links.push_back({i, j, config.spheres[i].center - config.spheres[j].center});
  return links;
}

SingleLayerOperator::SingleLayerOperator(const Configuration& config, int lmax)
    : config_(config), lmax_(lmax) {
  if (lmax < 0 || lmax > kMaxDegree) throw LayoutError("degree out of range");
  source_scale_.resize(config.size() * (lmax + 1));
  target_scale_.resize(config.size() * (lmax + 1));
  for (std::size_t i = 0; i < config.size(); ++i) {
    double r = config.spheres[i].radius;
    for (int l = 0; l <= lmax; ++l) {
      double p = std::pow(r, l + 2);
      source_scale_[i * (lmax + 1) + l] = p / (2.0 * l + 1.0);
      target_scale_[i * (lmax + 1) + l] = p;
    }
  }
}

void SingleLayerOperator::apply(const double* x, double* y) const {
  const int K = sh_count(lmax_);
  const std::size_t n = config_.size() * K;
  std::vector<double> u(n), w(n, 0.0);
  for (std::size_t i = 0; i < config_.size(); ++i)
    for (int l = 0; l <= lmax_; ++l) {
      double s = source_scale_[i * (lmax_ + 1) + l];
      for (int m = -l; m <= l; ++m) u[i * K + sh_index(l, m)] = s * x[i * K + sh_index(l, m)];
    }
  apply_cross(u.data(), w.data());
  // the self block is diagonal: r^3/(2l+1) from expansion to projection
  for (std::size_t i = 0; i < config_.size(); ++i) {
    double r = config_.spheres[i].radius;
    for (int l = 0; l <= lmax_; ++l) {
      double t = target_scale_[i * (lmax_ + 1) + l];
      double self = r * r * r / (2.0 * l + 1.0);
      for (int m = -l; m <= l; ++m) {
        std::size_t k = i * K + sh_index(l, m);
        y[k] = t * w[k] + self * x[k];
      }
    }
  }
}

CoeffVector SingleLayerOperator::apply(const CoeffVector& x) const {
  if (x.representation() != Representation::Expansion)
    throw LayoutError("single-layer operator expects an expansion vector");
  if (x.spheres() != config_.size() || x.lmax() != lmax_)
    throw LayoutError("vector layout does not match the operator");
  CoeffVector xf = to_full(x);
  CoeffVector y(full_layout(), Representation::Projection);
  apply(xf.data(), y.data());
  return x.space() == Space::Reduced ? to_reduced(y) : y;
}

DirectSingleLayer::DirectSingleLayer(const Configuration& config, int lmax,
                                     std::size_t cache_budget_bytes)
    : SingleLayerOperator(config, lmax) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(config.size() * (config.size() - 1));
  for (std::uint32_t i = 0; i < config.size(); ++i)
    for (std::uint32_t j = 0; j < config.size(); ++j)
      if (i != j) pairs.emplace_back(i, j);
  pairs_ = std::make_unique<GroupedTransfer>(TransferKind::M2L, lmax, lmax,
                                             sphere_pair_links(config, pairs), cache_budget_bytes);
}

void DirectSingleLayer::apply_cross(const double* u, double* w) const { pairs_->apply(u, w); }

std::vector<double> dense_matrix(const SingleLayerOperator& op) {
  const std::size_t n = op.full_layout().size();
  std::vector<double> A(n * n), e(n, 0.0), col(n);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    op.apply(e.data(), col.data());
    e[c] = 0.0;
    for (std::size_t r = 0; r < n; ++r) A[r * n + c] = col[r];
  }
  return A;
}

std::vector<double> assemble_dense_V(const Configuration& config, int lmax, BlockMethod method) {
  const std::size_t K = sh_count(lmax), N = config.size(), n = N * K;
  std::vector<double> A(n * n, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const Sphere& t = config.spheres[i];
      const Sphere& s = config.spheres[j];
      std::vector<double> block;
      if (method == BlockMethod::Quadrature) {
        block = single_layer_block_quadrature(s, t, lmax);
      } else if (i != j) {
        block = translation_block(s, t, lmax, method).entries;
      } else {
        block.assign(K * K, 0.0);
        for (std::size_t k = 0; k < K; ++k)
          block[k * K + k] = std::pow(t.radius, 3) / (2.0 * sh_from_index(int(k)).l + 1.0);
      }
      for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = 0; b < K; ++b) A[(i * K + a) * n + j * K + b] = block[a * K + b];
    }
  return A;
}

}  // namespace spherepol
