#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rbg/point_process.hpp"

namespace rbg {

/// Uniform cell grid over a window with cell side >= a search radius, used to
/// enumerate candidate pairs within that radius. Points are bucketed with a
/// counting sort; queries visit the 3^d neighbouring cells (fewer when an axis
/// has under three cells).
class CellGrid {
 public:
  CellGrid(const Window& window, double radius, std::span<const double> coords)
      : window_(window) {
    window.validate();
    if (!(radius > 0.0)) throw std::invalid_argument("grid radius must be positive");
    const auto per_axis = std::max<long long>(1, static_cast<long long>(std::floor(window.side / radius)));
    // Keep the cell count sane when the radius is tiny relative to the window.
    const double max_cells = 1 << 24;
    cells_per_axis_ = static_cast<std::size_t>(
        std::min<double>(static_cast<double>(per_axis), std::floor(std::pow(max_cells, 1.0 / window.dim))));
    cells_per_axis_ = std::max<std::size_t>(1, cells_per_axis_);
    cell_side_ = window.side / static_cast<double>(cells_per_axis_);
    std::size_t total = 1;
    for (int k = 0; k < window.dim; ++k) total *= cells_per_axis_;

    const std::size_t n = coords.size() / static_cast<std::size_t>(window.dim);
    std::vector<std::uint32_t> cell_of(n);
    offsets_.assign(total + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      cell_of[i] = static_cast<std::uint32_t>(cell_index(coords.subspan(i * window.dim, window.dim)));
      ++offsets_[cell_of[i] + 1];
    }
    for (std::size_t c = 0; c < total; ++c) offsets_[c + 1] += offsets_[c];
    items_.resize(n);
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) items_[cursor[cell_of[i]]++] = static_cast<std::uint32_t>(i);
  }

  std::size_t cells_per_axis() const { return cells_per_axis_; }
  double cell_side() const { return cell_side_; }
  const Window& window() const { return window_; }
  std::size_t cell_count() const { return offsets_.size() - 1; }

  std::size_t cell_index(std::span<const double> x) const {
    std::size_t cell = 0;
    for (int k = window_.dim - 1; k >= 0; --k) cell = cell * cells_per_axis_ + axis_cell(x[k]);
    return cell;
  }

  /// Centre of a cell, written to `out`.
  void cell_centre(std::size_t cell, std::span<double> out) const {
    for (int k = 0; k < window_.dim; ++k) {
      out[k] = -window_.half() + (static_cast<double>(cell % cells_per_axis_) + 0.5) * cell_side_;
      cell /= cells_per_axis_;
    }
  }

  /// Calls fn(index) for every stored point in the cells adjacent to x. Each
  /// point is visited at most once. Callers filter by actual distance.
  template <class Fn>
  void for_each_candidate(std::span<const double> x, Fn&& fn) const {
    const int dim = window_.dim;
    // Up to three distinct cell coordinates per axis.
    std::size_t axis_cells[8][3];
    std::size_t axis_count[8];
    if (dim > 8) throw std::invalid_argument("grid supports d <= 8");
    const auto n = static_cast<long long>(cells_per_axis_);
    for (int k = 0; k < dim; ++k) {
      const long long c = static_cast<long long>(axis_cell(x[k]));
      std::size_t m = 0;
      if (n <= 3 && window_.boundary == Boundary::torus) {
        for (long long j = 0; j < n; ++j) axis_cells[k][m++] = static_cast<std::size_t>(j);
      } else {
        for (long long j = c - 1; j <= c + 1; ++j) {
          long long w = j;
          if (window_.boundary == Boundary::torus) {
            w = (j + n) % n;
          } else if (j < 0 || j >= n) {
            continue;
          }
          axis_cells[k][m++] = static_cast<std::size_t>(w);
        }
      }
      axis_count[k] = m;
    }
    std::size_t pos[8] = {};
    while (true) {
      std::size_t cell = 0;
      for (int k = dim - 1; k >= 0; --k) cell = cell * cells_per_axis_ + axis_cells[k][pos[k]];
      for (auto it = offsets_[cell]; it < offsets_[cell + 1]; ++it) fn(items_[it]);
      int k = 0;
      while (k < dim && ++pos[k] == axis_count[k]) pos[k++] = 0;
      if (k == dim) break;
    }
  }

 private:
  std::size_t axis_cell(double v) const {
    const double t = (v + window_.half()) / cell_side_;
    if (t <= 0.0) return 0;
    const auto c = static_cast<std::size_t>(t);
    return std::min(c, cells_per_axis_ - 1);
  }

  Window window_;
  std::size_t cells_per_axis_ = 1;
  double cell_side_ = 1.0;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> items_;
};

/// Flattened candidate lists: for every cell, all stored points of the cells
/// a query from that cell would visit. Worth building when queries greatly
/// outnumber stored points; memory is about 3^d times the point count.
class NeighbourhoodTable {
 public:
  explicit NeighbourhoodTable(const CellGrid& grid) {
    const std::size_t cells = grid.cell_count();
    std::vector<double> centre(static_cast<std::size_t>(grid.window().dim));
    offsets_.reserve(cells + 1);
    offsets_.push_back(0);
    for (std::size_t c = 0; c < cells; ++c) {
      grid.cell_centre(c, centre);
      grid.for_each_candidate(centre, [&](std::uint32_t i) { items_.push_back(i); });
      offsets_.push_back(static_cast<std::uint32_t>(items_.size()));
    }
    grid_ = &grid;
  }

  /// Same set as CellGrid::for_each_candidate(x), as a contiguous range.
  std::span<const std::uint32_t> candidates(std::span<const double> x) const {
    const auto c = grid_->cell_index(x);
    return {items_.data() + offsets_[c], items_.data() + offsets_[c + 1]};
  }

 private:
  const CellGrid* grid_ = nullptr;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> items_;
};

}  // namespace rbg
