#include "lv/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lv/errors.hpp"

namespace lv {

namespace {

struct Regression {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

// y against x, plain least squares.
Regression regress(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  Regression out;
  if (sxx <= 0.0 || syy <= 0.0) return out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r2 = (sxy * sxy) / (sxx * syy);
  return out;
}

}  // namespace

RateFit fit_blowup_rate(const std::vector<NormSample>& samples) {
  RateFit fit;
  std::vector<double> t, logm;
  t.reserve(samples.size());
  logm.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.norm_sum > 0.0) {
      t.push_back(s.t);
      logm.push_back(std::log(s.norm_sum));
    }
  }
  if (t.size() < 10) {
    fit.reason = "fewer than 10 positive samples";
    return fit;
  }
  const double m_last = std::exp(logm.back());
  // Trailing window: from the last sample below m_last/10 (inclusive, so the
  // window spans at least one decade).
  std::size_t start = 0;
  bool found_below = false;
  for (std::size_t i = t.size(); i-- > 0;) {
    if (std::exp(logm[i]) < m_last / 10.0) {
      start = i;
      found_below = true;
      break;
    }
  }
  if (!found_below) {
    fit.reason = "norm series spans less than one decade of growth";
    return fit;
  }
  // Widen a sparse window: at least 10 samples, even past one decade.
  if (t.size() - start < 10) start = t.size() - 10;
  std::vector<double> wt(t.begin() + start, t.end());
  std::vector<double> wy(logm.begin() + start, logm.end());

  const double t_last = wt.back();
  const double span = t_last - wt.front();
  if (!(span > 0.0)) {
    fit.reason = "degenerate time window";
    return fit;
  }
  // Search over g = T - t_last (log-spaced scan + golden-section refinement).
  auto r2_of = [&](double g) {
    std::vector<double> x(wt.size());
    const double T = t_last + g;
    for (std::size_t i = 0; i < wt.size(); ++i) x[i] = std::log(T - wt[i]);
    return regress(x, wy).r2;
  };
  const double g_lo = std::max(span * 1e-12, std::abs(t_last) * 1e-15);
  const double g_hi = span * 10.0;
  double best_g = g_lo, best_r2 = -1.0;
  const int scan = 256;
  for (int i = 0; i <= scan; ++i) {
    const double g = g_lo * std::pow(g_hi / g_lo, static_cast<double>(i) / scan);
    const double r = r2_of(g);
    if (r > best_r2) {
      best_r2 = r;
      best_g = g;
    }
  }
  {
    // Golden section on log g around the scan optimum.
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double la = std::log(std::max(g_lo, best_g / 4.0));
    double lb = std::log(std::min(g_hi, best_g * 4.0));
    double x1 = lb - phi * (lb - la), x2 = la + phi * (lb - la);
    double f1 = r2_of(std::exp(x1)), f2 = r2_of(std::exp(x2));
    for (int it = 0; it < 120 && lb - la > 1e-14; ++it) {
      if (f1 < f2) {
        la = x1;
        x1 = x2;
        f1 = f2;
        x2 = la + phi * (lb - la);
        f2 = r2_of(std::exp(x2));
      } else {
        lb = x2;
        x2 = x1;
        f2 = f1;
        x1 = lb - phi * (lb - la);
        f1 = r2_of(std::exp(x1));
      }
    }
    const double g = std::exp(0.5 * (la + lb));
    if (r2_of(g) > best_r2) best_g = g;
  }

  const double T = t_last + best_g;
  std::vector<double> x(wt.size());
  for (std::size_t i = 0; i < wt.size(); ++i) x[i] = std::log(T - wt[i]);
  const Regression reg = regress(x, wy);
  fit.ok = true;
  fit.slope = reg.slope;
  fit.intercept = reg.intercept;
  fit.r2 = reg.r2;
  fit.t_est = T;
  fit.window_t0 = wt.front();
  fit.window_t1 = wt.back();
  fit.window_size = wt.size();
  return fit;
}

const char* to_string(BoundRegime r) {
  switch (r) {
    case BoundRegime::Interior: return "interior";
    case BoundRegime::BoundaryCondition: return "boundary";
    case BoundRegime::ScaleInvariant: return "scale_invariant";
  }
  return "?";
}

int bound_c1(BoundRegime r) { return r == BoundRegime::ScaleInvariant ? 0 : 1; }
int bound_c2(BoundRegime r) { return r == BoundRegime::BoundaryCondition ? 0 : 1; }

BoundReport universal_bound_statistic(const SolveOutcome& run, double T,
                                      BoundRegime regime) {
  if (run.samples.empty()) throw DataError("bound statistic: empty trajectory");
  BoundReport rep;
  rep.regime = regime;
  const double C1 = bound_c1(regime);
  const bool want_dist = bound_c2(regime) == 1;
  const bool finite_T = std::isfinite(T);
  auto denom_time = [&](double t) {
    double d = C1 + 1.0 / t;
    if (finite_T) d += 1.0 / (T - t);
    return d;
  };

  const bool dist_active =
      want_dist && !run.snapshots.empty() &&
      run.snapshots.front().grid()->bc != BoundaryKind::None;
  if (want_dist && run.snapshots.empty())
    throw DataError("bound statistic: the dist regime needs field snapshots");

  if (!dist_active) {
    // dist^{-2} contributes zero: the statistic only needs the norm series.
    for (const auto& s : run.samples) {
      if (!(s.t > 0.0)) continue;
      if (finite_T && !(s.t < T)) continue;
      const double val = s.norm_sum / denom_time(s.t);
      ++rep.samples_used;
      if (val > rep.c_emp) {
        rep.c_emp = val;
        rep.argmax_t = s.t;
        rep.argmax_index = s.argmax;
      }
    }
    return rep;
  }

  const Grid& grid = *run.snapshots.front().grid();
  const Field dist = boundary_distance(grid);
  const double exclusion =
      regime == BoundRegime::ScaleInvariant ? 2.0 * grid.max_spacing() : 0.0;
  for (const auto& snap : run.snapshots) {
    if (!(snap.t > 0.0)) continue;
    if (finite_T && !(snap.t < T)) continue;
    const double dt_part = denom_time(snap.t);
    ++rep.samples_used;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double d = dist.v[k];
      if (d < exclusion) {
        ++rep.excluded_points;
        continue;
      }
      const double denom = dt_part + 1.0 / (d * d);
      const double val = (snap.u.v[k] + snap.v.v[k]) / denom;
      if (val > rep.c_emp) {
        rep.c_emp = val;
        rep.argmax_t = snap.t;
        rep.argmax_index = static_cast<std::uint32_t>(k);
      }
    }
  }
  return rep;
}

double proportionality_deficit(const State& state, double K) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < state.u.v.size(); ++k) {
    num = std::max(num, std::abs(state.u.v[k] - K * state.v.v[k]));
    den = std::max(den, std::abs(state.u.v[k] + K * state.v.v[k]));
  }
  if (den == 0.0) throw DataError("proportionality deficit: zero state");
  return num / den;
}

double scaling_residual(const ProblemSpec& spec, const SolveOutcome& traj,
                        double lambda, const StepControls& controls,
                        std::array<double, 2> x0, int snap_a, int snap_b) {
  if (traj.snapshots.size() < 2)
    throw DataError("scaling residual: need at least two snapshots");
  const int count = static_cast<int>(traj.snapshots.size());
  if (snap_a < 0) snap_a = count / 4;
  if (snap_b < 0) snap_b = (3 * count) / 4;
  snap_a = std::clamp(snap_a, 0, count - 2);
  snap_b = std::clamp(snap_b, snap_a + 1, count - 1);
  const State& sa = traj.snapshots[snap_a];
  const State& sb = traj.snapshots[snap_b];
  if (!(sb.t > sa.t)) throw DataError("scaling residual: snapshots not ordered");

  ScalingParams p;
  p.lambda = lambda;
  p.x0 = x0;
  p.t0 = sa.t;
  const State ra = rescale_state(sa, p, spec).state;
  const State rb = rescale_state(sb, p, spec).state;
  // Mid-trajectory continuation: no separate first-step cap.
  StepControls cont = controls;
  cont.dt_init = cont.dt_max;
  const State evolved = evolve_to_time(spec, ra, rb.t, cont);
  const double num =
      std::max(max_abs_diff(evolved.u, rb.u), max_abs_diff(evolved.v, rb.v));
  const double den = std::max(max_norm(rb.u), max_norm(rb.v));
  if (den == 0.0) throw DataError("scaling residual: zero rescaled state");
  return num / den;
}

double ode_manifold_blowup_time(const OdeParams& p, double u0) {
  const double K = proportionality_constant(p.b1, p.b2, p.c1, p.c2, p.q);
  const double c = p.c1 / std::pow(K, p.q) - p.b1;
  const double pw = p.q + p.r;
  if (!(c > 0.0) || !(u0 > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / ((pw - 1.0) * c * std::pow(u0, pw - 1.0));
}

namespace {

struct Rhs2 {
  const OdeParams& p;
  void operator()(double u, double v, double& du, double& dv) const {
    auto powp = [](double b, double e) { return b <= 0.0 ? 0.0 : std::pow(b, e); };
    if (p.q == 1.0 && p.r == 1.0) {
      du = u * (-p.b1 * u + p.c1 * v);
      dv = v * (-p.b2 * v + p.c2 * u);
    } else {
      du = powp(u, p.r) * (-p.b1 * powp(u, p.q) + p.c1 * powp(v, p.q));
      dv = powp(v, p.r) * (-p.b2 * powp(v, p.q) + p.c2 * powp(u, p.q));
    }
  }
};

}  // namespace

OdeValue ode_oracle(const OdeParams& p, double u0, double v0, double t,
                    double tol) {
  if (u0 < 0.0 || v0 < 0.0) throw ParameterError("ode oracle: data must be nonnegative");
  if (t < 0.0) throw ParameterError("ode oracle: t must be nonnegative");
  if (u0 == 0.0 && v0 == 0.0) return {0.0, 0.0};

  const double K = proportionality_constant(p.b1, p.b2, p.c1, p.c2, p.q);
  if (p.r == 1.0 && std::abs(u0 - K * v0) <= 1e-14 * (u0 + K * v0)) {
    const double c = p.c1 / std::pow(K, p.q) - p.b1;
    const double pw = p.q + p.r;
    if (c > 0.0) {
      const double T = ode_manifold_blowup_time(p, u0);
      if (t >= T)
        throw DomainError("ode oracle: t >= blow-up time T = " + std::to_string(T));
      const double base = 1.0 - (pw - 1.0) * c * std::pow(u0, pw - 1.0) * t;
      const double u = u0 * std::pow(base, -1.0 / (pw - 1.0));
      return {u, u / K};
    }
  }

  // Embedded Dormand-Prince 5(4), adaptive.
  static const double A[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double E[7] = {35.0 / 384 - 5179.0 / 57600,
                              0.0,
                              500.0 / 1113 - 7571.0 / 16695,
                              125.0 / 192 - 393.0 / 640,
                              -2187.0 / 6784 + 92097.0 / 339200,
                              11.0 / 84 - 187.0 / 2100,
                              -1.0 / 40};
  const Rhs2 f{p};
  double u = u0, v = v0, tc = 0.0;
  double h = std::min(1e-3, t > 0.0 ? t : 1e-3);
  double ku[7], kv[7];
  long evals = 0;
  while (tc < t) {
    h = std::min(h, t - tc);
    f(u, v, ku[0], kv[0]);
    for (int s = 1; s < 7; ++s) {
      double su = u, sv = v;
      for (int j = 0; j < s; ++j) {
        su += h * A[s][j] * ku[j];
        sv += h * A[s][j] * kv[j];
      }
      f(su, sv, ku[s], kv[s]);
    }
    double u5 = u, v5 = v, eu = 0.0, ev = 0.0;
    for (int s = 0; s < 7; ++s) {
      if (s < 6) {
        u5 += h * A[6][s] * ku[s];
        v5 += h * A[6][s] * kv[s];
      }
      eu += h * E[s] * ku[s];
      ev += h * E[s] * kv[s];
    }
    const double su = tol + tol * std::max(std::abs(u), std::abs(u5));
    const double sv = tol + tol * std::max(std::abs(v), std::abs(v5));
    const double err = std::sqrt(0.5 * ((eu / su) * (eu / su) + (ev / sv) * (ev / sv)));
    if (err <= 1.0) {
      tc += h;
      u = u5;
      v = v5;
    }
    const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    h *= fac;
    if (!std::isfinite(u) || !std::isfinite(v) || u + v > 1e14 ||
        h < 1e-16 * std::max(1.0, tc)) {
      throw DomainError("ode oracle: blow-up reached near t = " + std::to_string(tc));
    }
    if (++evals > 50'000'000)
      throw NumericalError("ode oracle: step budget exhausted");
  }
  return {u, v};
}

}  // namespace lv
