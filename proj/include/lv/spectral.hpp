#pragma once

#include <vector>

#include "lv/grid.hpp"

namespace lv {

/// Space-time grid function over one period: nt + 1 slices at times
/// j * T / nt, j = 0..nt. Periodic data satisfies slice(nt) == slice(0) up to
/// the reported defect.
struct SpaceTimeField {
  GridPtr grid;
  double period = 1.0;
  int nt = 1;
  std::vector<std::vector<double>> slices;  // nt + 1 entries

  SpaceTimeField() = default;
  SpaceTimeField(GridPtr g, double T, int nt_);

  double dt() const { return period / nt; }
  double time(int j) const { return period * j / nt; }
  double max_norm() const;

  template <typename F>
  static SpaceTimeField from(GridPtr g, double T, int nt, F&& f) {
    SpaceTimeField out(g, T, nt);
    for (int j = 0; j <= nt; ++j) {
      const double t = out.time(j);
      if (g->dim == 1) {
        for (int i = 0; i < g->n[0]; ++i)
          out.slices[j][i] = f(g->coords[0][i], 0.0, t);
      } else {
        for (int i = 0; i < g->n[0]; ++i)
          for (int jj = 0; jj < g->n[1]; ++jj)
            out.slices[j][g->index(i, jj)] =
                f(g->coords[0][i], g->coords[1][jj], t);
      }
    }
    return out;
  }
};

SpaceTimeField positive_part(const SpaceTimeField& f);
double max_abs_diff(const SpaceTimeField& a, const SpaceTimeField& b);

/// Principal eigenpair of the negative Laplacian with the grid's boundary
/// handling, normalized to sup-norm one with a positive eigenfield.
struct EigenPair {
  double value = 0.0;
  Field phi;
  double residual = 0.0;  // sup norm of (-L)phi - value*phi
};

/// Inverse power iteration until the residual drops below rel_tol * value.
EigenPair principal_eigenvalue(GridPtr grid, double rel_tol = 1e-10,
                               int max_iter = 400);

/// Principal pair of the backward time-periodic eigenproblem
/// -phi_t - Lap(phi) = value * phi with Dirichlet conditions. The operator is
/// time-independent, so the time-constant extension of the principal spatial
/// pair is returned; the reported residual is the full space-time defect.
struct PeriodicEigenPair {
  double value = 0.0;
  SpaceTimeField phi;
  double residual = 0.0;
  double periodicity_defect = 0.0;
};

PeriodicEigenPair adjoint_periodic_eigenpair(GridPtr grid, double T,
                                             int nt = 64);

/// Solves w_t - Lap(w) = f, w(., 0) = w(., T), Dirichlet, by contraction on
/// the time-T affine map (backward-Euler steps). Returns the full periodic
/// trajectory.
struct PeriodicSolve {
  SpaceTimeField w;
  double periodicity_defect = 0.0;
  int iterations = 0;
};

PeriodicSolve periodic_linear_solve(const SpaceTimeField& f, double tol = 1e-13,
                                    int max_iter = 400);

}  // namespace lv
