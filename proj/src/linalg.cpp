#include "lv/linalg.hpp"

#include <cmath>

#include "lv/errors.hpp"

namespace lv {

void ShiftedLaplacian::apply(const std::vector<double>& x,
                             std::vector<double>& out) const {
  const Grid& g = *grid;
  out.resize(x.size());
  const bool mirror = (g.bc != BoundaryKind::Dirichlet);
  if (g.dim == 1) {
    const int n = g.n[0];
    const double w = beta / (g.h[0] * g.h[0]);
    for (int i = 0; i < n; ++i) {
      const double left = i > 0 ? x[i - 1] : (mirror ? x[0] : 0.0);
      const double right = i < n - 1 ? x[i + 1] : (mirror ? x[n - 1] : 0.0);
      double d = alpha + (sigma ? (*sigma)[i] : 0.0);
      out[i] = d * x[i] + w * (2.0 * x[i] - left - right);
    }
  } else {
    const int n0 = g.n[0], n1 = g.n[1];
    const double w0 = beta / (g.h[0] * g.h[0]);
    const double w1 = beta / (g.h[1] * g.h[1]);
    for (int i = 0; i < n0; ++i) {
      for (int j = 0; j < n1; ++j) {
        const std::size_t k = g.index(i, j);
        const double c = x[k];
        const double xm = i > 0 ? x[k - n1] : (mirror ? c : 0.0);
        const double xp = i < n0 - 1 ? x[k + n1] : (mirror ? c : 0.0);
        const double ym = j > 0 ? x[k - 1] : (mirror ? c : 0.0);
        const double yp = j < n1 - 1 ? x[k + 1] : (mirror ? c : 0.0);
        double d = alpha + (sigma ? (*sigma)[k] : 0.0);
        out[k] = d * c + w0 * (2.0 * c - xm - xp) + w1 * (2.0 * c - ym - yp);
      }
    }
  }
}

void solve_shifted_laplacian_1d(const ShiftedLaplacian& op,
                                const std::vector<double>& rhs,
                                std::vector<double>& x) {
  const Grid& g = *op.grid;
  const int n = g.n[0];
  const double w = op.beta / (g.h[0] * g.h[0]);
  const bool mirror = (g.bc != BoundaryKind::Dirichlet);
  std::vector<double> diag(n), cprime(n);
  for (int i = 0; i < n; ++i) {
    double d = op.alpha + (op.sigma ? (*op.sigma)[i] : 0.0) + 2.0 * w;
    if (mirror && (i == 0 || i == n - 1)) d -= w;
    diag[i] = d;
  }
  x.resize(n);
  // Thomas elimination with constant off-diagonal -w.
  double denom = diag[0];
  if (denom == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
  cprime[0] = -w / denom;
  x[0] = rhs[0] / denom;
  for (int i = 1; i < n; ++i) {
    denom = diag[i] + w * cprime[i - 1];
    if (denom == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
    cprime[i] = -w / denom;
    x[i] = (rhs[i] + w * x[i - 1]) / denom;
  }
  for (int i = n - 2; i >= 0; --i) x[i] -= cprime[i] * x[i + 1];
}

void solve_shifted_laplacian_cg(const ShiftedLaplacian& op,
                                const std::vector<double>& rhs,
                                std::vector<double>& x, double rel_tol,
                                int max_iter) {
  const std::size_t n = rhs.size();
  if (max_iter <= 0) max_iter = static_cast<int>(10 * n + 200);
  x.assign(n, 0.0);
  // Jacobi preconditioner from the operator diagonal.
  const Grid& g = *op.grid;
  std::vector<double> invd(n);
  {
    const bool mirror = (g.bc != BoundaryKind::Dirichlet);
    const double w0 = op.beta / (g.h[0] * g.h[0]);
    const double w1 = g.dim == 2 ? op.beta / (g.h[1] * g.h[1]) : 0.0;
    for (int i = 0; i < g.n[0]; ++i) {
      for (int j = 0; j < g.row_len(); ++j) {
        const std::size_t k = g.index(i, j);
        double d = op.alpha + (op.sigma ? (*op.sigma)[k] : 0.0);
        double dd = 2.0 * w0;
        if (mirror && (i == 0 || i == g.n[0] - 1)) dd -= w0;
        if (g.dim == 2) {
          dd += 2.0 * w1;
          if (mirror && (j == 0 || j == g.n[1] - 1)) dd -= w1;
        }
        invd[k] = 1.0 / (d + dd);
      }
    }
  }
  std::vector<double> r = rhs, z(n), p(n), Ap(n);
  double rhs_norm = 0.0;
  for (double v : rhs) rhs_norm += v * v;
  rhs_norm = std::sqrt(rhs_norm);
  if (rhs_norm == 0.0) return;
  double rz = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    z[k] = invd[k] * r[k];
    rz += r[k] * z[k];
  }
  p = z;
  const double stop = rel_tol * rhs_norm;
  for (int it = 0; it < max_iter; ++it) {
    double rnorm = 0.0;
    for (double v : r) rnorm += v * v;
    if (std::sqrt(rnorm) <= stop) return;
    op.apply(p, Ap);
    double pAp = 0.0;
    for (std::size_t k = 0; k < n; ++k) pAp += p[k] * Ap[k];
    if (pAp <= 0.0) throw NumericalError("cg: operator not positive definite");
    const double a = rz / pAp;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += a * p[k];
      r[k] -= a * Ap[k];
    }
    double rz_next = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      z[k] = invd[k] * r[k];
      rz_next += r[k] * z[k];
    }
    const double b = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + b * p[k];
  }
  throw NumericalError("cg: no convergence within iteration cap");
}

void solve_shifted_laplacian(const ShiftedLaplacian& op,
                             const std::vector<double>& rhs,
                             std::vector<double>& x) {
  if (op.grid->dim == 1) {
    solve_shifted_laplacian_1d(op, rhs, x);
  } else {
    solve_shifted_laplacian_cg(op, rhs, x);
  }
}

}  // namespace lv
