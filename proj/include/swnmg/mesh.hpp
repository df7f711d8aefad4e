#pragma once

#include <string>
#include <vector>

#include "core.hpp"

namespace swnmg {

/// Uniform partition of [x_min, x_max]; cell j covers [x_min + j dx, x_min + (j+1) dx).
struct Mesh1D {
  static constexpr int dimension = 1;

  double x_min = 0.0;
  double x_max = 1.0;
  int n_cells = 1;
  double dx = 1.0;

  double center(int j) const { return x_min + (j + 0.5) * dx; }
  double face(int j) const { return x_min + j * dx; }  // left face of cell j
  GridShape shape() const { return {n_cells, 1}; }
  int size() const { return n_cells; }
};

/// Uniform rectangular mesh; cells are indexed row-major, j * nx + i.
struct Mesh2D {
  static constexpr int dimension = 2;

  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  int nx = 1;
  int ny = 1;
  double dx = 1.0;
  double dy = 1.0;

  double center_x(int i) const { return x_min + (i + 0.5) * dx; }
  double center_y(int j) const { return y_min + (j + 0.5) * dy; }
  GridShape shape() const { return {nx, ny}; }
  int size() const { return nx * ny; }
  int index(int i, int j) const { return j * nx + i; }
};

inline Mesh1D build_uniform_1d(double x_min, double x_max, int n_cells) {
  if (!(x_max > x_min) || n_cells < 1)
    throw SolverError(ErrorCode::invalid_domain,
                      "1D mesh needs x_max > x_min and at least one cell");
  return Mesh1D{x_min, x_max, n_cells, (x_max - x_min) / n_cells};
}

struct Bounds2D {
  double x_min, x_max, y_min, y_max;
};

inline Mesh2D build_uniform_2d(const Bounds2D& b, int nx, int ny) {
  if (!(b.x_max > b.x_min) || !(b.y_max > b.y_min) || nx < 1 || ny < 1)
    throw SolverError(ErrorCode::invalid_domain, "2D mesh needs a nonempty rectangle and nx, ny >= 1");
  return Mesh2D{b.x_min, b.x_max, b.y_min, b.y_max, nx, ny,
                (b.x_max - b.x_min) / nx, (b.y_max - b.y_min) / ny};
}

inline Mesh1D coarsen(const Mesh1D& m) {
  return build_uniform_1d(m.x_min, m.x_max, m.n_cells / 2);
}

inline Mesh2D coarsen(const Mesh2D& m) {
  return build_uniform_2d({m.x_min, m.x_max, m.y_min, m.y_max}, m.nx / 2, m.ny / 2);
}

/// Factor-2 aggregation between two consecutive grid shapes.
struct Aggregation {
  GridShape fine;
  GridShape coarse;
  int fx = 2;  // aggregation factor along x
  int fy = 1;  // along y (1 for 1D grids)

  int parent(int fine_index) const {
    const int i = fine_index % fine.nx;
    const int j = fine_index / fine.nx;
    return coarse.index(i / fx, j / fy);
  }

  /// Fine cells of a coarse cell, in row-major order.
  std::vector<int> children(int coarse_index) const {
    const int I = coarse_index % coarse.nx;
    const int J = coarse_index / coarse.nx;
    std::vector<int> out;
    out.reserve(fx * fy);
    for (int b = 0; b < fy; ++b)
      for (int a = 0; a < fx; ++a) out.push_back(fine.index(I * fx + a, J * fy + b));
    return out;
  }
};

inline Aggregation make_aggregation(GridShape fine, GridShape coarse) {
  Aggregation agg{fine, coarse, fine.nx / coarse.nx, fine.ny / coarse.ny};
  if (agg.fx * coarse.nx != fine.nx || agg.fy * coarse.ny != fine.ny)
    throw SolverError(ErrorCode::shape_mismatch, "shapes are not related by aggregation");
  return agg;
}

/// Finest-to-coarsest levels produced by repeated factor-2 aggregation.
template <class Mesh>
struct MeshHierarchy {
  std::vector<Mesh> levels;  // levels[0] is the finest
  /// child_map[l][j] lists the cells of level l-1 that make up cell j of level l (l >= 1).
  std::vector<std::vector<std::vector<int>>> child_map;

  int coarsest_level() const { return static_cast<int>(levels.size()) - 1; }

  Aggregation aggregation(int level) const {
    return make_aggregation(levels[level - 1].shape(), levels[level].shape());
  }
};

namespace detail {
inline bool can_halve(const Mesh1D& m, int min_cells) {
  return m.n_cells / 2 >= min_cells;
}
inline bool can_halve(const Mesh2D& m, int min_cells) {
  return m.nx / 2 >= min_cells && m.ny / 2 >= min_cells;
}
inline bool divisible(const Mesh1D& m) { return m.n_cells % 2 == 0; }
inline bool divisible(const Mesh2D& m) { return m.nx % 2 == 0 && m.ny % 2 == 0; }
}  // namespace detail

/// Coarsens until the next halving would push a direction below min_cells.
template <class Mesh>
MeshHierarchy<Mesh> build_hierarchy(const Mesh& finest, int min_cells) {
  if (min_cells < 1)
    throw SolverError(ErrorCode::invalid_domain, "min_cells must be positive");
  MeshHierarchy<Mesh> h;
  h.levels.push_back(finest);
  h.child_map.emplace_back();
  while (detail::can_halve(h.levels.back(), min_cells)) {
    const Mesh& fine = h.levels.back();
    if (!detail::divisible(fine))
      throw SolverError(ErrorCode::non_coarsenable,
                        "cell count is not divisible by 2 at level " +
                            std::to_string(h.levels.size() - 1));
    Mesh coarse = coarsen(fine);
    const Aggregation agg = make_aggregation(fine.shape(), coarse.shape());
    std::vector<std::vector<int>> kids(coarse.size());
    for (int c = 0; c < coarse.size(); ++c) kids[c] = agg.children(c);
    h.levels.push_back(coarse);
    h.child_map.push_back(std::move(kids));
  }
  return h;
}

inline int default_min_cells(int dimension) { return dimension == 1 ? 12 : 4; }

}  // namespace swnmg
