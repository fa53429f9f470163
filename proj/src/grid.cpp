#include "lv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lv/errors.hpp"

namespace lv {

const char* to_string(BoundaryKind bc) {
  switch (bc) {
    case BoundaryKind::Dirichlet: return "dirichlet";
    case BoundaryKind::Neumann: return "neumann";
    case BoundaryKind::None: return "none";
  }
  return "?";
}

Grid Grid::make(int dim, std::array<int, 2> n, std::array<double, 2> lo,
                std::array<double, 2> hi, BoundaryKind bc) {
  if (dim < 1 || dim > 2) throw ParameterError("grid dim must be 1 or 2");
  Grid g;
  g.dim = dim;
  g.bc = bc;
  g.lo = lo;
  g.hi = hi;
  if (dim == 1) n[1] = 1;
  g.n = n;
  for (int ax = 0; ax < dim; ++ax) {
    if (n[ax] < 2) throw ParameterError("grid needs at least 2 points per axis");
    const double extent = hi[ax] - lo[ax];
    if (!(extent > 0.0)) throw ParameterError("grid extent must be positive");
    if (bc == BoundaryKind::Dirichlet) {
      g.h[ax] = extent / (n[ax] + 1);
      g.coords[ax].resize(n[ax]);
      for (int i = 0; i < n[ax]; ++i) g.coords[ax][i] = lo[ax] + (i + 1) * g.h[ax];
    } else {
      g.h[ax] = extent / n[ax];
      g.coords[ax].resize(n[ax]);
      for (int i = 0; i < n[ax]; ++i) g.coords[ax][i] = lo[ax] + (i + 0.5) * g.h[ax];
    }
  }
  if (dim == 1) {
    g.h[1] = 0.0;
    g.coords[1] = {0.0};
  }
  return g;
}

bool Grid::same_box(const Grid& other) const {
  if (dim != other.dim) return false;
  for (int ax = 0; ax < dim; ++ax) {
    if (lo[ax] != other.lo[ax] || hi[ax] != other.hi[ax]) return false;
  }
  return true;
}

GridPtr make_grid(int dim, std::array<int, 2> n, std::array<double, 2> lo,
                  std::array<double, 2> hi, BoundaryKind bc) {
  return std::make_shared<const Grid>(Grid::make(dim, n, lo, hi, bc));
}

double max_norm(const Field& f) {
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::abs(x));
  return m;
}

double min_value(const Field& f) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : f.v) m = std::min(m, x);
  return m;
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.v.size(); ++k)
    m = std::max(m, std::abs(a.v[k] - b.v[k]));
  return m;
}

double mass(const Field& f) {
  double s = 0.0;
  for (double x : f.v) s += x;
  return s * f.grid->cell_volume();
}

double dot(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.v.size(); ++k) s += a.v[k] * b.v[k];
  return s * a.grid->cell_volume();
}

bool all_finite(const Field& f) {
  for (double x : f.v)
    if (!std::isfinite(x)) return false;
  return true;
}

Field apply_laplacian(const Field& f, BoundaryKind bc) {
  const Grid& g = *f.grid;
  Field out(f.grid);
  const bool mirror = (bc != BoundaryKind::Dirichlet);
  if (g.dim == 1) {
    const int n = g.n[0];
    const double ih2 = 1.0 / (g.h[0] * g.h[0]);
    for (int i = 0; i < n; ++i) {
      const double left = i > 0 ? f.v[i - 1] : (mirror ? f.v[0] : 0.0);
      const double right = i < n - 1 ? f.v[i + 1] : (mirror ? f.v[n - 1] : 0.0);
      out.v[i] = (left - 2.0 * f.v[i] + right) * ih2;
    }
  } else {
    const int n0 = g.n[0], n1 = g.n[1];
    const double ih0 = 1.0 / (g.h[0] * g.h[0]);
    const double ih1 = 1.0 / (g.h[1] * g.h[1]);
    for (int i = 0; i < n0; ++i) {
      for (int j = 0; j < n1; ++j) {
        const std::size_t k = g.index(i, j);
        const double c = f.v[k];
        const double xm = i > 0 ? f.v[k - n1] : (mirror ? c : 0.0);
        const double xp = i < n0 - 1 ? f.v[k + n1] : (mirror ? c : 0.0);
        const double ym = j > 0 ? f.v[k - 1] : (mirror ? c : 0.0);
        const double yp = j < n1 - 1 ? f.v[k + 1] : (mirror ? c : 0.0);
        out.v[k] = (xm - 2.0 * c + xp) * ih0 + (ym - 2.0 * c + yp) * ih1;
      }
    }
  }
  return out;
}

Field boundary_distance(const Grid& grid) {
  Field out(std::make_shared<const Grid>(grid));
  if (grid.bc == BoundaryKind::None) {
    std::fill(out.v.begin(), out.v.end(),
              std::numeric_limits<double>::infinity());
    return out;
  }
  if (grid.dim == 1) {
    for (int i = 0; i < grid.n[0]; ++i) {
      const double x = grid.coords[0][i];
      out.v[i] = std::min(x - grid.lo[0], grid.hi[0] - x);
    }
  } else {
    for (int i = 0; i < grid.n[0]; ++i) {
      const double dx = std::min(grid.coords[0][i] - grid.lo[0],
                                 grid.hi[0] - grid.coords[0][i]);
      for (int j = 0; j < grid.n[1]; ++j) {
        const double dy = std::min(grid.coords[1][j] - grid.lo[1],
                                   grid.hi[1] - grid.coords[1][j]);
        out.v[grid.index(i, j)] = std::min(dx, dy);
      }
    }
  }
  return out;
}

namespace {

// Per-axis interpolation stencil: value = (1-t)*f(i0) + t*f(i1), where the
// index -1 stands for the zero boundary node of a Dirichlet grid.
struct AxisStencil {
  int i0, i1;
  double t;
};

AxisStencil axis_stencil(const Grid& g, int ax, double x) {
  const int n = g.n[ax];
  const std::vector<double>& c = g.coords[ax];
  if (g.bc == BoundaryKind::Dirichlet) {
    // Augmented nodes lo, c[0..n-1], hi with zero boundary values; uniform h.
    if (x <= c[0]) {
      const double t = (x - g.lo[ax]) / g.h[ax];
      return {-1, 0, std::clamp(t, 0.0, 1.0)};
    }
    if (x >= c[n - 1]) {
      const double t = (x - c[n - 1]) / g.h[ax];
      return {n - 1, -1, std::clamp(t, 0.0, 1.0)};
    }
    int i = static_cast<int>((x - c[0]) / g.h[ax]);
    i = std::clamp(i, 0, n - 2);
    return {i, i + 1, (x - c[i]) / g.h[ax]};
  }
  // Cell-centered: clamp to the end segments (linear extension).
  int i = static_cast<int>(std::floor((x - c[0]) / g.h[ax]));
  i = std::clamp(i, 0, n - 2);
  return {i, i + 1, (x - c[i]) / g.h[ax]};
}

}  // namespace

double sample_field(const Field& f, double x, double y) {
  const Grid& g = *f.grid;
  const AxisStencil sx = axis_stencil(g, 0, x);
  if (g.dim == 1) {
    const double f0 = sx.i0 >= 0 ? f.v[sx.i0] : 0.0;
    const double f1 = sx.i1 >= 0 ? f.v[sx.i1] : 0.0;
    return (1.0 - sx.t) * f0 + sx.t * f1;
  }
  const AxisStencil sy = axis_stencil(g, 1, y);
  auto at = [&](int i, int j) -> double {
    if (i < 0 || j < 0) return 0.0;
    return f.v[g.index(i, j)];
  };
  const double a = (1.0 - sy.t) * at(sx.i0, sy.i0) + sy.t * at(sx.i0, sy.i1);
  const double b = (1.0 - sy.t) * at(sx.i1, sy.i0) + sy.t * at(sx.i1, sy.i1);
  return (1.0 - sx.t) * a + sx.t * b;
}

Field resample(const Field& f, GridPtr target) {
  if (!f.grid->same_box(*target))
    throw DomainError("resample: source and target grids span different boxes");
  Field out(target);
  if (target->dim == 1) {
    for (int i = 0; i < target->n[0]; ++i)
      out.v[i] = sample_field(f, target->coords[0][i]);
  } else {
    for (int i = 0; i < target->n[0]; ++i)
      for (int j = 0; j < target->n[1]; ++j)
        out.v[target->index(i, j)] =
            sample_field(f, target->coords[0][i], target->coords[1][j]);
  }
  return out;
}

}  // namespace lv
