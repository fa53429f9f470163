#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <memory>
#include <type_traits>
#include <vector>

namespace lv {

/// Boundary handling for a run. `None` emulates the whole space: the grid is
/// cell-centered like Neumann and the boundary-distance statistic contributes
/// zero.
enum class BoundaryKind { Dirichlet, Neumann, None };

const char* to_string(BoundaryKind bc);

/// Uniform tensor grid over an axis-aligned box, dim 1 or 2.
///
/// Dirichlet grids are vertex-centered on interior nodes: h = extent/(n+1),
/// coordinates lo + (i+1)h, with the homogeneous boundary values implicit.
/// Neumann/None grids are cell-centered: h = extent/n, coordinates
/// lo + (i+1/2)h, with mirrored ghost cells.
struct Grid {
  int dim = 1;
  BoundaryKind bc = BoundaryKind::Dirichlet;
  std::array<int, 2> n{1, 1};         // points per axis; n[1]==1 when dim==1
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<double, 2> h{0.0, 0.0};
  std::array<std::vector<double>, 2> coords;

  static Grid make(int dim, std::array<int, 2> n, std::array<double, 2> lo,
                   std::array<double, 2> hi, BoundaryKind bc);

  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * (dim == 2 ? n[1] : 1);
  }
  int row_len() const { return dim == 2 ? n[1] : 1; }
  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) * row_len() + j;
  }
  double cell_volume() const { return dim == 2 ? h[0] * h[1] : h[0]; }
  double max_spacing() const { return dim == 2 ? std::max(h[0], h[1]) : h[0]; }
  bool same_box(const Grid& other) const;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(int dim, std::array<int, 2> n, std::array<double, 2> lo,
                  std::array<double, 2> hi, BoundaryKind bc);

/// Grid function stored row-major (axis 0 is the slow index).
struct Field {
  GridPtr grid;
  std::vector<double> v;

  Field() = default;
  explicit Field(GridPtr g, double fill = 0.0)
      : grid(std::move(g)), v(grid->size(), fill) {}

  double& operator[](std::size_t k) { return v[k]; }
  double operator[](std::size_t k) const { return v[k]; }
  std::size_t size() const { return v.size(); }
};

/// Fills a field from f(x) in 1D or f(x, y) in 2D (a one-argument callable on
/// a 2D grid ignores y).
template <typename F>
Field field_from(GridPtr g, F&& f) {
  Field out(g);
  auto eval = [&](double x, double y) {
    if constexpr (std::is_invocable_v<F&, double, double>) {
      return f(x, y);
    } else {
      (void)y;
      return f(x);
    }
  };
  if (g->dim == 1) {
    for (int i = 0; i < g->n[0]; ++i) out.v[i] = eval(g->coords[0][i], 0.0);
  } else {
    for (int i = 0; i < g->n[0]; ++i)
      for (int j = 0; j < g->n[1]; ++j)
        out.v[g->index(i, j)] = eval(g->coords[0][i], g->coords[1][j]);
  }
  return out;
}

double max_norm(const Field& f);
double min_value(const Field& f);
double max_abs_diff(const Field& a, const Field& b);
/// Integral of f over the box (cell volume times sum).
double mass(const Field& f);
/// Cell-volume-weighted inner product.
double dot(const Field& a, const Field& b);
bool all_finite(const Field& f);

/// Second-order central-difference Laplacian. Dirichlet ghost values are 0;
/// Neumann/None ghosts are mirrored.
Field apply_laplacian(const Field& f, BoundaryKind bc);

/// Per-point distance to the nearest box face. For BoundaryKind::None the
/// sentinel +infinity is returned everywhere (the dist^{-2} statistic term is
/// then zero).
Field boundary_distance(const Grid& grid);

/// Samples f at physical coordinates by multilinear interpolation.
/// Dirichlet grids honor the zero boundary values (the stencil is augmented
/// with boundary nodes); cell-centered grids extend the end segments, which
/// keeps the sampling exact on multilinear functions.
double sample_field(const Field& f, double x, double y = 0.0);

/// Multilinear resampling onto a target grid spanning the same box.
Field resample(const Field& f, GridPtr target);

}  // namespace lv
