#pragma once

#include <vector>

#include "lv/grid.hpp"

namespace lv {

/// Sparse operator A = alpha*I + diag(sigma) + beta*(-Laplacian_h) on a grid,
/// with the grid's boundary handling. SPD for alpha + sigma >= 0, beta > 0
/// (strictly positive definite unless the Neumann all-constant kernel applies
/// with alpha = sigma = 0).
struct ShiftedLaplacian {
  const Grid* grid = nullptr;
  double alpha = 0.0;
  double beta = 1.0;
  const std::vector<double>* sigma = nullptr;  // optional per-point shift

  void apply(const std::vector<double>& x, std::vector<double>& out) const;
};

/// Direct tridiagonal solve (1D grids).
void solve_shifted_laplacian_1d(const ShiftedLaplacian& op,
                                const std::vector<double>& rhs,
                                std::vector<double>& x);

/// Conjugate gradient with Jacobi preconditioning (any dim). Deterministic.
/// Throws NumericalError when the iteration cap is hit.
void solve_shifted_laplacian_cg(const ShiftedLaplacian& op,
                                const std::vector<double>& rhs,
                                std::vector<double>& x, double rel_tol = 1e-13,
                                int max_iter = 0);

/// Dispatches to the tridiagonal solver in 1D, CG otherwise.
void solve_shifted_laplacian(const ShiftedLaplacian& op,
                             const std::vector<double>& rhs,
                             std::vector<double>& x);

}  // namespace lv
