#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "a2g/geometry.hpp"

namespace a2g {

// Uniform bucket grid over a bounding box. Items are integer ids; queries
// outside the box clamp to the border cells.
class SpatialGrid {
public:
  SpatialGrid(Box extent, std::size_t expected_items) : origin_(extent.min) {
    const double w = std::max(extent.width(), 1e-6);
    const double h = std::max(extent.height(), 1e-6);
    const double n = static_cast<double>(std::max<std::size_t>(expected_items, 1));
    cell_ = std::sqrt(w * h / n);
    cell_ = std::max({cell_, w / kMaxCells, h / kMaxCells});
    nx_ = std::clamp(static_cast<int>(std::ceil(w / cell_)), 1, kMaxCells);
    ny_ = std::clamp(static_cast<int>(std::ceil(h / cell_)), 1, kMaxCells);
    cells_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
  }

  void insert_point(int id, Point2 p) { cells_[index(col(p.x), row(p.y))].push_back(id); }

  void insert_box(int id, const Box& b) {
    for (int i = col(b.min.x); i <= col(b.max.x); ++i) {
      for (int j = row(b.min.y); j <= row(b.max.y); ++j) cells_[index(i, j)].push_back(id);
    }
  }

  void insert_segment(int id, Point2 a, Point2 b, double pad) {
    visit_cells(a, b, pad, [&](std::size_t c) { cells_[c].push_back(id); });
  }

  // Calls fn(items) for every cell within `pad` of segment [a, b].
  template <class Fn>
  void visit_segment(Point2 a, Point2 b, double pad, Fn&& fn) const {
    visit_cells(a, b, pad, [&](std::size_t c) { fn(cells_[c]); });
  }

  template <class Fn>
  void visit_box(const Box& b, Fn&& fn) const {
    for (int i = col(b.min.x); i <= col(b.max.x); ++i) {
      for (int j = row(b.min.y); j <= row(b.max.y); ++j) fn(cells_[index(i, j)]);
    }
  }

  const std::vector<int>& items_at(Point2 p) const { return cells_[index(col(p.x), row(p.y))]; }

  template <class Fn>
  void for_each_cell(Fn&& fn) const {
    for (const auto& c : cells_) {
      if (c.size() > 1) fn(c);
    }
  }

private:
  static constexpr int kMaxCells = 2048;

  int col(double x) const {
    return std::clamp(static_cast<int>(std::floor((x - origin_.x) / cell_)), 0, nx_ - 1);
  }
  int row(double y) const {
    return std::clamp(static_cast<int>(std::floor((y - origin_.y) / cell_)), 0, ny_ - 1);
  }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
  }

  // Supercover of the padded segment, column by column.
  template <class Fn>
  void visit_cells(Point2 a, Point2 b, double pad, Fn&& fn) const {
    if (a.x > b.x) std::swap(a, b);
    const int c0 = col(a.x - pad);
    const int c1 = col(b.x + pad);
    const double dx = b.x - a.x;
    for (int i = c0; i <= c1; ++i) {
      double lo_x = std::max(a.x, origin_.x + i * cell_ - pad);
      double hi_x = std::min(b.x, origin_.x + (i + 1) * cell_ + pad);
      if (i == c0) lo_x = a.x;
      if (i == c1) hi_x = b.x;
      double y0;
      double y1;
      if (dx <= 0.0) {
        y0 = a.y;
        y1 = b.y;
      } else {
        lo_x = std::clamp(lo_x, a.x, b.x);
        hi_x = std::clamp(hi_x, a.x, b.x);
        y0 = a.y + (b.y - a.y) * (lo_x - a.x) / dx;
        y1 = a.y + (b.y - a.y) * (hi_x - a.x) / dx;
      }
      if (y0 > y1) std::swap(y0, y1);
      for (int j = row(y0 - pad); j <= row(y1 + pad); ++j) fn(index(i, j));
    }
  }

  Point2 origin_;
  double cell_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::vector<int>> cells_;
};

}  // namespace a2g
