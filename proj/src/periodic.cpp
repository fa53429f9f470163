#include "lv/periodic.hpp"

#include <algorithm>
#include <cmath>

#include "lv/errors.hpp"
#include "lv/linalg.hpp"

namespace lv {

double homotopy_gain(GridPtr grid, double period) {
  return adjoint_periodic_eigenpair(std::move(grid), period).value + 1.0;
}

const char* to_string(OrbitStatus s) {
  switch (s) {
    case OrbitStatus::Converged: return "converged";
    case OrbitStatus::ConvergedTrivial: return "trivial";
    case OrbitStatus::Diverged: return "diverged";
    case OrbitStatus::MaxIterations: return "max_iterations";
  }
  return "?";
}

namespace {

struct BlendCoeffs {
  std::vector<double> a1, a2, b1, b2, c1, c2, K;
};

void sample_blend(const ProblemSpec& spec, const Grid& grid, double t,
                  BlendCoeffs& c) {
  spec.a1.sample_on(grid, t, c.a1);
  spec.a2.sample_on(grid, t, c.a2);
  spec.b1.sample_on(grid, t, c.b1);
  spec.b2.sample_on(grid, t, c.b2);
  spec.c1.sample_on(grid, t, c.c1);
  spec.c2.sample_on(grid, t, c.c2);
  c.K.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    c.K[k] = (c.c1[k] + c.b2[k]) / (c.c2[k] + c.b1[k]);
}

// Blended reaction at one point.
inline void blend_reaction(const BlendCoeffs& c, std::size_t k, double lambda,
                           double gain, double u, double v, double& fu,
                           double& fv) {
  const double lv_u = u * (c.a1[k] - c.b1[k] * u + c.c1[k] * v);
  const double lv_v = v * (c.a2[k] - c.b2[k] * v + c.c2[k] * u);
  if (lambda >= 1.0) {
    fu = lv_u;
    fv = lv_v;
    return;
  }
  const double K = c.K[k];
  fu = lambda * lv_u + (1.0 - lambda) * (gain * u + K * K * K * v * v);
  fv = lambda * lv_v + (1.0 - lambda) * (gain * v + u * u);
}

}  // namespace

PoincareResult poincare_map(const ProblemSpec& spec, const State& state0,
                            double lambda, const PoincareOptions& options) {
  if (!spec.period) throw ParameterError("poincare map: spec has no period");
  if (spec.q != 1.0 || spec.r != 1.0)
    throw ParameterError("poincare map: homotopy is defined for q = r = 1");
  if (lambda < 0.0 || lambda > 1.0)
    throw ParameterError("poincare map: lambda must lie in [0, 1]");
  const double T = *spec.period;
  const Grid& grid = *state0.grid();
  const int nt = options.nt > 0
                     ? options.nt
                     : static_cast<int>(std::ceil(T / options.dt_max));
  const double dt = T / nt;
  const double gain =
      lambda < 1.0 ? homotopy_gain(state0.grid(), T) : 0.0;

  const std::size_t n = grid.size();
  const bool timedep = spec.coefficients_depend_on_t();
  BlendCoeffs coeffs;
  ShiftedLaplacian op{&grid, 1.0, dt, nullptr};

  PoincareResult out;
  out.end = state0;
  if (options.record) {
    out.trajectory.clear();
    out.trajectory.push_back(state0);
  }
  std::vector<double> fu(n), fv(n), rhs(n), un(n), vn(n), up(n), vp(n);
  bool have_coeffs = false;
  for (int j = 0; j < nt; ++j) {
    const double t_next = state0.t + (j + 1) * dt;
    if (!have_coeffs || timedep) {
      sample_blend(spec, grid, t_next, coeffs);
      have_coeffs = true;
    }
    // Fully implicit step, resolved by Picard iteration:
    //   z = (I - dt Lap)^{-1} (z_j + dt f(z, t_{j+1})).
    un = out.end.u.v;
    vn = out.end.v.v;
    double change = 0.0;
    int m = 0;
    for (; m < options.picard_max; ++m) {
      for (std::size_t k = 0; k < n; ++k) {
        blend_reaction(coeffs, k, lambda, gain, un[k], vn[k], fu[k], fv[k]);
      }
      for (std::size_t k = 0; k < n; ++k) rhs[k] = out.end.u.v[k] + dt * fu[k];
      solve_shifted_laplacian(op, rhs, up);
      for (std::size_t k = 0; k < n; ++k) rhs[k] = out.end.v.v[k] + dt * fv[k];
      solve_shifted_laplacian(op, rhs, vp);
      change = 0.0;
      double scale = 1e-300;
      for (std::size_t k = 0; k < n; ++k) {
        change = std::max(change, std::abs(up[k] - un[k]));
        change = std::max(change, std::abs(vp[k] - vn[k]));
        scale = std::max({scale, std::abs(up[k]), std::abs(vp[k])});
      }
      un.swap(up);
      vn.swap(vp);
      if (!std::isfinite(change) || scale > options.blow_cap) {
        out.diverged = true;
        return out;
      }
      if (change <= options.picard_tol * scale) break;
    }
    if (m >= options.picard_max) {
      out.diverged = true;  // the implicit solve lost contraction
      return out;
    }
    out.end.u.v = un;
    out.end.v.v = vn;
    out.end.t = t_next;
    double sup = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      sup = std::max(sup, std::abs(un[k]) + std::abs(vn[k]));
    if (!std::isfinite(sup) || sup > options.blow_cap) {
      out.diverged = true;
      return out;
    }
    if (options.record) out.trajectory.push_back(out.end);
  }
  return out;
}

std::pair<SpaceTimeField, SpaceTimeField> apply_T_operator(
    const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& v) {
  if (!spec.period) throw ParameterError("T operator: spec has no period");
  const GridPtr& grid = u.grid;
  if (grid->bc != BoundaryKind::Dirichlet)
    throw ParameterError("T operator: Dirichlet problems only");
  const int nt = u.nt;
  SpaceTimeField fu(grid, u.period, nt), fv(grid, u.period, nt);
  std::vector<double> a1, a2, b1, b2, c1, c2;
  for (int j = 0; j <= nt; ++j) {
    const double t = u.time(j);
    spec.a1.sample_on(*grid, t, a1);
    spec.a2.sample_on(*grid, t, a2);
    spec.b1.sample_on(*grid, t, b1);
    spec.b2.sample_on(*grid, t, b2);
    spec.c1.sample_on(*grid, t, c1);
    spec.c2.sample_on(*grid, t, c2);
    for (std::size_t k = 0; k < grid->size(); ++k) {
      const double uu = u.slices[j][k], vv = v.slices[j][k];
      fu.slices[j][k] = uu * (a1[k] - b1[k] * uu + c1[k] * vv);
      fv.slices[j][k] = vv * (a2[k] - b2[k] * vv + c2[k] * uu);
    }
  }
  auto wu = periodic_linear_solve(fu);
  auto wv = periodic_linear_solve(fv);
  return {positive_part(wu.w), positive_part(wv.w)};
}

namespace {

double coefficient_scale(const ProblemSpec& spec, const Grid& grid) {
  std::vector<double> s;
  double scale = 1.0;
  for (const CoefficientField* f : {&spec.a1, &spec.a2, &spec.b1, &spec.b2,
                                    &spec.c1, &spec.c2}) {
    f->sample_on(grid, 0.0, s);
    double m = 0.0;
    for (double v : s) m += std::abs(v);
    scale = std::max(scale, m / s.size());
  }
  return scale;
}

// Stacked-vector helpers for the orbit solvers.
void pack(const State& s, std::vector<double>& x) {
  const std::size_t n = s.u.v.size();
  x.resize(2 * n);
  std::copy(s.u.v.begin(), s.u.v.end(), x.begin());
  std::copy(s.v.v.begin(), s.v.v.end(), x.begin() + n);
}

void unpack(const std::vector<double>& x, State& s) {
  const std::size_t n = s.u.v.size();
  std::copy(x.begin(), x.begin() + n, s.u.v.begin());
  std::copy(x.begin() + n, x.end(), s.v.v.begin());
}

double inf_norm(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double two_norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Restarted GMRES on a matrix-free operator; returns the attained relative
// residual.
template <typename MatVec>
double gmres(MatVec&& Av, const std::vector<double>& b, std::vector<double>& x,
             int restart, int max_iter, double tol) {
  const std::size_t n = b.size();
  x.assign(n, 0.0);
  const double bnorm = two_norm(b);
  if (bnorm == 0.0) return 0.0;
  std::vector<std::vector<double>> V;
  std::vector<double> w(n), cs(restart + 1), sn(restart + 1), g(restart + 1);
  std::vector<std::vector<double>> H(restart + 1, std::vector<double>(restart, 0.0));
  double rel = 1.0;
  int iters = 0;
  while (iters < max_iter) {
    // Residual r = b - A x.
    Av(x, w);
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - w[k];
    double beta = two_norm(r);
    rel = beta / bnorm;
    if (rel <= tol) return rel;
    V.assign(1, r);
    for (double& v : V[0]) v /= beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int j = 0;
    for (; j < restart && iters < max_iter; ++j, ++iters) {
      Av(V[j], w);
      for (int i = 0; i <= j; ++i) {
        double h = 0.0;
        for (std::size_t k = 0; k < n; ++k) h += w[k] * V[i][k];
        H[i][j] = h;
        for (std::size_t k = 0; k < n; ++k) w[k] -= h * V[i][k];
      }
      H[j + 1][j] = two_norm(w);
      if (H[j + 1][j] > 0.0) {
        V.push_back(w);
        for (double& v : V[j + 1]) v /= H[j + 1][j];
      }
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
        H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
        H[i][j] = t;
      }
      const double denom = std::hypot(H[j][j], H[j + 1][j]);
      if (denom == 0.0) {
        ++j;
        break;
      }
      cs[j] = H[j][j] / denom;
      sn[j] = H[j + 1][j] / denom;
      H[j][j] = denom;
      H[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      rel = std::abs(g[j + 1]) / bnorm;
      if (rel <= tol) {
        ++j;
        break;
      }
    }
    // Back-substitution for the Krylov coefficients.
    std::vector<double> y(j, 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int k2 = i + 1; k2 < j; ++k2) s -= H[i][k2] * y[k2];
      y[i] = s / H[i][i];
    }
    for (int i = 0; i < j; ++i)
      for (std::size_t k = 0; k < n; ++k) x[k] += y[i] * V[i][k];
    if (rel <= tol) return rel;
    if (j == 0) break;
  }
  return rel;
}

PeriodicOrbit build_orbit(const ProblemSpec& spec, const State& x0,
                          double lambda, const OrbitOptions& options,
                          const std::vector<double>& history) {
  PeriodicOrbit orbit;
  orbit.lambda = lambda;
  orbit.period = *spec.period;
  orbit.convergence = history;
  PoincareOptions rec = options.map;
  rec.record = true;
  PoincareResult pr = poincare_map(spec, x0, lambda, rec);
  orbit.snapshots = std::move(pr.trajectory);
  double num = 0.0, den = 1e-300, margin = std::numeric_limits<double>::infinity();
  double sup = 0.0;
  const std::size_t n = x0.u.v.size();
  if (!pr.diverged && !orbit.snapshots.empty()) {
    const State& s0 = orbit.snapshots.front();
    const State& sT = orbit.snapshots.back();
    for (std::size_t k = 0; k < n; ++k) {
      num = std::max({num, std::abs(sT.u.v[k] - s0.u.v[k]),
                      std::abs(sT.v.v[k] - s0.v.v[k])});
      den = std::max({den, std::abs(s0.u.v[k]), std::abs(s0.v.v[k])});
    }
    for (const State& s : orbit.snapshots) {
      for (std::size_t k = 0; k < n; ++k) {
        margin = std::min({margin, s.u.v[k], s.v.v[k]});
        sup = std::max(sup, s.u.v[k] + s.v.v[k]);
      }
    }
  }
  orbit.residual = num / den;
  orbit.positivity_margin = margin;
  orbit.sup_norm = sup;
  return orbit;
}

}  // namespace

State default_orbit_guess(const ProblemSpec& spec, GridPtr grid, double beta) {
  const EigenPair ep = principal_eigenvalue(grid);
  const Grid& g = *grid;
  std::vector<double> b1, b2, c1, c2, a1, a2;
  spec.b1.sample_on(g, 0.0, b1);
  spec.b2.sample_on(g, 0.0, b2);
  spec.c1.sample_on(g, 0.0, c1);
  spec.c2.sample_on(g, 0.0, c2);
  spec.a1.sample_on(g, 0.0, a1);
  spec.a2.sample_on(g, 0.0, a2);
  double Kbar = 0.0, abar = 0.0, b1bar = 0.0, c1bar = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    Kbar += (c1[k] + b2[k]) / (c2[k] + b1[k]);
    abar += 0.5 * (a1[k] + a2[k]);
    b1bar += b1[k];
    c1bar += c1[k];
  }
  const double inv = 1.0 / g.size();
  Kbar *= inv;
  abar *= inv;
  b1bar *= inv;
  c1bar *= inv;
  if (beta <= 0.0) {
    const double sigma = std::max(reduced_constant(b1bar, c1bar, Kbar), 0.1);
    beta = 0.75 * std::max(0.5, (ep.value - abar) / sigma);
  }
  State guess(grid, 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    guess.u.v[k] = beta * ep.phi.v[k];
    guess.v.v[k] = beta * ep.phi.v[k] / Kbar;
  }
  return guess;
}

OrbitSearch find_periodic_orbit(const ProblemSpec& spec, const State& guess,
                                double lambda, OrbitMethod method,
                                const OrbitOptions& options) {
  if (!spec.period) throw ParameterError("orbit search: spec has no period");
  const Grid& grid = *guess.grid();
  if (grid.bc != BoundaryKind::Dirichlet)
    throw ParameterError("orbit search: Dirichlet problems only");
  {
    // Precondition a1, a2 < Lambda_1 pointwise (sampled over one period).
    const EigenPair ep = principal_eigenvalue(guess.grid());
    std::vector<double> a;
    const int nt_check = spec.coefficients_depend_on_t() ? 17 : 1;
    for (const CoefficientField* f : {&spec.a1, &spec.a2}) {
      for (int j = 0; j < nt_check; ++j) {
        f->sample_on(grid, *spec.period * j / nt_check, a);
        for (double v : a)
          if (!(v < ep.value))
            throw ParameterError("orbit search: requires a1, a2 < Lambda_1");
      }
    }
  }

  const double cutoff =
      options.trivial_cutoff * coefficient_scale(spec, grid);
  OrbitSearch result;
  std::vector<double> history;
  State x = guess;

  auto classify_static = [&](const State& s, double residual) -> bool {
    const double norm = s.sum_max_norm();
    if (norm <= cutoff) {
      result.status = OrbitStatus::ConvergedTrivial;
      result.note = "collapsed to the zero solution";
      return true;
    }
    if (residual <= options.tol) {
      result.status = OrbitStatus::Converged;
      return true;
    }
    return false;
  };

  if (method == OrbitMethod::DampedFixedPoint) {
    for (int it = 0; it < options.max_outer; ++it) {
      ++result.iterations;
      PoincareResult pr = poincare_map(spec, x, lambda, options.map);
      if (pr.diverged) {
        result.status = OrbitStatus::Diverged;
        result.note = "trajectory blew up before the period";
        result.orbit.lambda = lambda;
        result.orbit.period = *spec.period;
        result.orbit.convergence = history;
        return result;
      }
      double num = 0.0, den = 1e-300;
      for (std::size_t k = 0; k < x.u.v.size(); ++k) {
        num = std::max({num, std::abs(pr.end.u.v[k] - x.u.v[k]),
                        std::abs(pr.end.v.v[k] - x.v.v[k])});
        den = std::max({den, std::abs(x.u.v[k]), std::abs(x.v.v[k])});
      }
      const double res = num / den;
      history.push_back(res);
      const double th = options.damping;
      for (std::size_t k = 0; k < x.u.v.size(); ++k) {
        x.u.v[k] = (1.0 - th) * x.u.v[k] + th * pr.end.u.v[k];
        x.v.v[k] = (1.0 - th) * x.v.v[k] + th * pr.end.v.v[k];
      }
      x.t = guess.t;
      if (x.sum_max_norm() > options.map.blow_cap) {
        result.status = OrbitStatus::Diverged;
        result.note = "iterates grew past the divergence cap";
        result.orbit.lambda = lambda;
        result.orbit.period = *spec.period;
        result.orbit.convergence = history;
        return result;
      }
      if (classify_static(x, res)) break;
    }
    result.orbit = build_orbit(spec, x, lambda, options, history);
    if (result.status == OrbitStatus::MaxIterations)
      result.note = "fixed-point iteration did not settle";
    return result;
  }

  // Newton-Krylov on F(x) = P(x) - x with finite-difference directional
  // derivatives and restarted GMRES.
  std::vector<double> xv, fx, fx_trial, b, d, w;
  pack(x, xv);
  State tmp = x;
  auto eval_F = [&](const std::vector<double>& xin, std::vector<double>& out) -> bool {
    unpack(xin, tmp);
    tmp.t = guess.t;
    PoincareResult pr = poincare_map(spec, tmp, lambda, options.map);
    if (pr.diverged) return false;
    out.resize(xin.size());
    const std::size_t n = tmp.u.v.size();
    for (std::size_t k = 0; k < n; ++k) {
      out[k] = pr.end.u.v[k] - xin[k];
      out[n + k] = pr.end.v.v[k] - xin[n + k];
    }
    return true;
  };

  if (!eval_F(xv, fx)) {
    result.status = OrbitStatus::Diverged;
    result.note = "trajectory blew up before the period";
    result.orbit.lambda = lambda;
    result.orbit.period = *spec.period;
    return result;
  }
  for (int it = 0; it < options.max_outer; ++it) {
    ++result.iterations;
    const double xnorm = inf_norm(xv);
    const double res = inf_norm(fx) / std::max(xnorm, 1e-300);
    history.push_back(res);
    unpack(xv, tmp);
    tmp.t = guess.t;
    if (classify_static(tmp, res)) break;
    if (xnorm > options.map.blow_cap) {
      result.status = OrbitStatus::Diverged;
      result.note = "Newton iterates grew past the divergence cap";
      break;
    }

    b.resize(fx.size());
    for (std::size_t k = 0; k < fx.size(); ++k) b[k] = -fx[k];
    const double x2 = two_norm(xv);
    bool jac_diverged = false;
    auto Jv = [&](const std::vector<double>& vin, std::vector<double>& out) {
      const double vn = two_norm(vin);
      out.assign(vin.size(), 0.0);
      if (vn == 0.0 || jac_diverged) return;
      const double eps = options.fd_eps * std::max(x2, 1.0) / vn;
      std::vector<double> xp(xv.size());
      for (std::size_t k = 0; k < xv.size(); ++k) xp[k] = xv[k] + eps * vin[k];
      std::vector<double> fp;
      if (!eval_F(xp, fp)) {
        jac_diverged = true;
        return;
      }
      for (std::size_t k = 0; k < xv.size(); ++k)
        out[k] = (fp[k] - fx[k]) / eps;
    };
    gmres(Jv, b, d, options.gmres_restart, options.gmres_max, options.gmres_tol);
    if (jac_diverged) {
      result.status = OrbitStatus::Diverged;
      result.note = "linearization probe blew up";
      break;
    }

    // Backtracking on the residual norm.
    const double f0 = inf_norm(fx);
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 5; ++ls, step *= 0.5) {
      std::vector<double> xt(xv.size());
      for (std::size_t k = 0; k < xv.size(); ++k) xt[k] = xv[k] + step * d[k];
      if (!eval_F(xt, fx_trial)) continue;  // shrink past the divergent step
      if (inf_norm(fx_trial) < f0 * (1.0 - 1e-4 * step) || ls == 4) {
        xv.swap(xt);
        fx.swap(fx_trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.status = OrbitStatus::Diverged;
      result.note = "no productive Newton step";
      break;
    }
  }
  unpack(xv, x);
  x.t = guess.t;
  if (result.status == OrbitStatus::Converged ||
      result.status == OrbitStatus::ConvergedTrivial ||
      result.status == OrbitStatus::MaxIterations) {
    result.orbit = build_orbit(spec, x, lambda, options, history);
    if (result.status == OrbitStatus::MaxIterations)
      result.note = "Newton did not reach the residual target";
  } else {
    result.orbit.lambda = lambda;
    result.orbit.period = *spec.period;
    result.orbit.convergence = history;
  }
  return result;
}

std::vector<SweepEntry> homotopy_sweep(const ProblemSpec& spec,
                                       const State& seed,
                                       const std::vector<double>& lambdas,
                                       const OrbitOptions& options) {
  std::vector<SweepEntry> entries;
  State current = seed;
  bool have_orbit = false;
  for (double lam : lambdas) {
    const State& guess = have_orbit ? current : seed;
    OrbitSearch search =
        find_periodic_orbit(spec, guess, lam, OrbitMethod::NewtonKrylov, options);
    SweepEntry e;
    e.lambda = lam;
    e.status = search.status;
    e.residual = search.orbit.residual;
    e.sup_norm = search.orbit.sup_norm;
    e.positivity_margin = search.orbit.positivity_margin;
    entries.push_back(e);
    if (search.status == OrbitStatus::Converged &&
        !search.orbit.snapshots.empty()) {
      current = search.orbit.snapshots.front();
      have_orbit = true;
    }
  }
  return entries;
}

std::vector<double> adjoint_weighted_growth(const ProblemSpec& spec,
                                            const State& state0, int periods,
                                            const PoincareOptions& options) {
  if (!spec.period) throw ParameterError("adjoint growth: spec has no period");
  const PeriodicEigenPair pep =
      adjoint_periodic_eigenpair(state0.grid(), *spec.period);
  PoincareOptions rec = options;
  rec.record = true;
  std::vector<double> integrals;
  State s = state0;
  const double vol = state0.grid()->cell_volume();
  for (int p = 0; p < periods; ++p) {
    PoincareResult pr = poincare_map(spec, s, 0.0, rec);
    if (pr.diverged || pr.trajectory.empty()) break;
    const int nt = static_cast<int>(pr.trajectory.size()) - 1;
    const double dt = *spec.period / nt;
    double integral = 0.0;
    const auto& phi = pep.phi.slices[0];  // time-constant eigenfield
    for (int j = 0; j <= nt; ++j) {
      double slice = 0.0;
      for (std::size_t k = 0; k < phi.size(); ++k)
        slice += pr.trajectory[j].u.v[k] * phi[k];
      const double wt = (j == 0 || j == nt) ? 0.5 : 1.0;  // trapezoid
      integral += wt * slice * vol * dt;
    }
    integrals.push_back(integral);
    s = pr.trajectory.back();
  }
  return integrals;
}

}  // namespace lv
