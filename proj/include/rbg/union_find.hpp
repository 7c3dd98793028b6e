#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace rbg {

/// Disjoint sets with path compression and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
  }

  std::size_t size() const { return parent_.size(); }

  std::uint32_t find(std::uint32_t x) {
    std::uint32_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const auto next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  /// Returns false when x and y were already joined.
  bool unite(std::uint32_t x, std::uint32_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (size_[x] < size_[y]) std::swap(x, y);
    parent_[y] = x;
    size_[x] += size_[y];
    return true;
  }

  std::uint32_t set_size(std::uint32_t x) { return size_[find(x)]; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

/// Union-find on a torus that also tracks each vertex's unwrapped offset from
/// its root. Closing a cycle whose net displacement is a nonzero lattice vector
/// means the cluster wraps around the torus. Each vertex carries an integer
/// weight summed per component (agents count 1, hubs 0).
class WrappingUnionFind {
 public:
  WrappingUnionFind(std::size_t n, int dim, double side)
      : dim_(dim), side_(side), parent_(n), weight_(n, 0), rank_(n, 0),
        offset_(n * static_cast<std::size_t>(dim), 0.0) {
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
  }

  void set_weight(std::uint32_t v, std::uint32_t w) { weight_[v] = w; }

  /// Root of v; afterwards offset(v) is v's position minus the root's position
  /// in the unwrapped cover.
  std::uint32_t find(std::uint32_t v) {
    std::uint32_t root = v;
    path_.clear();
    while (parent_[root] != root) {
      path_.push_back(root);
      root = parent_[root];
    }
    // Walk back from the vertex nearest the root, accumulating offsets.
    for (auto it = path_.rbegin(); it != path_.rend(); ++it) {
      const auto node = *it;
      const auto par = parent_[node];
      if (par != root)
        for (int k = 0; k < dim_; ++k) offset_[node * dim_ + k] += offset_[par * dim_ + k];
      parent_[node] = root;
    }
    return root;
  }

  std::span<const double> offset(std::uint32_t v) const {
    return {offset_.data() + static_cast<std::size_t>(v) * dim_, static_cast<std::size_t>(dim_)};
  }

  /// Joins u and v where `delta` is the minimal-image displacement from u to v.
  /// Returns true when this edge closes a wrapping cycle.
  bool unite(std::uint32_t u, std::uint32_t v, std::span<const double> delta) {
    const auto ru = find(u);
    const auto rv = find(v);
    double shift[8];
    for (int k = 0; k < dim_; ++k) shift[k] = offset_[u * dim_ + k] + delta[k] - offset_[v * dim_ + k];
    // shift = pos(rv) - pos(ru) implied by this edge, in the unwrapped cover.
    if (ru == rv) {
      bool wraps = false;
      for (int k = 0; k < dim_; ++k)
        if (std::abs(shift[k]) > 0.5 * side_) wraps = true;
      if (wraps) wrapped_ = true;
      return wraps;
    }
    if (rank_[ru] < rank_[rv]) {
      parent_[ru] = rv;
      for (int k = 0; k < dim_; ++k) offset_[ru * dim_ + k] = -shift[k];
      weight_[rv] += weight_[ru];
    } else {
      parent_[rv] = ru;
      for (int k = 0; k < dim_; ++k) offset_[rv * dim_ + k] = shift[k];
      weight_[ru] += weight_[rv];
      if (rank_[ru] == rank_[rv]) ++rank_[ru];
    }
    return false;
  }

  std::uint32_t component_weight(std::uint32_t v) { return weight_[find(v)]; }
  bool any_wrapped() const { return wrapped_; }

 private:
  int dim_;
  double side_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> weight_;
  std::vector<std::uint8_t> rank_;
  std::vector<double> offset_;
  std::vector<std::uint32_t> path_;
  bool wrapped_ = false;
};

}  // namespace rbg
