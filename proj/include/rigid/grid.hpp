/// @file grid.hpp
/// @brief Uniform node grids on rectangles and fields sampled on them.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rigid/core_algebra.hpp"

namespace rigid {

/// Node (i, j) sits at origin + (i h, j h); i runs along x and is the fast
/// index.
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  Vec2 origin{0.0, 0.0};

  void validate() const {
    if (nx < 8 || ny < 8) throw std::invalid_argument("grid: need nx, ny >= 8");
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("grid: spacing must be positive");
    if (!std::isfinite(origin[0]) || !std::isfinite(origin[1])) throw std::invalid_argument("grid: bad origin");
  }

  std::size_t count() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  Vec2 node(int i, int j) const { return {origin[0] + i * h, origin[1] + j * h}; }
  double width() const { return (nx - 1) * h; }
  double height() const { return (ny - 1) * h; }

  /// n x n nodes spanning the square [lo, hi]^2.
  static GridSpec square(int n, double lo = -1.0, double hi = 1.0) {
    GridSpec g{n, n, (hi - lo) / (n - 1), {lo, lo}};
    g.validate();
    return g;
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.nx == b.nx && a.ny == b.ny && a.h == b.h && a.origin == b.origin;
  }
};

/// Values of type T at every node. An empty mask means every node is
/// active; otherwise only nodes with mask != 0 carry meaningful data.
template <class T>
struct GridField {
  GridSpec grid;
  std::vector<T> values;
  std::vector<std::uint8_t> mask;

  GridField() = default;
  explicit GridField(const GridSpec& g, const T& fill = T{}) : grid(g), values(g.count(), fill) { g.validate(); }

  T& at(int i, int j) { return values[grid.index(i, j)]; }
  const T& at(int i, int j) const { return values[grid.index(i, j)]; }
  bool active(int i, int j) const { return mask.empty() || mask[grid.index(i, j)] != 0; }
};

using ScalarField = GridField<double>;
using VecField = GridField<Vec2>;
using MatField = GridField<Mat2>;

template <class T>
GridField<T> sample(const GridSpec& g, const std::function<T(const Vec2&)>& f) {
  GridField<T> out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.at(i, j) = f(g.node(i, j));
  return out;
}

/// Nodewise map preserving grid and mask.
template <class T, class F>
auto map_field(const GridField<T>& in, F&& f) {
  using R = decltype(f(in.values.front()));
  GridField<R> out;
  out.grid = in.grid;
  out.mask = in.mask;
  out.values.reserve(in.values.size());
  for (const auto& v : in.values) out.values.push_back(f(v));
  return out;
}

}  // namespace rigid
