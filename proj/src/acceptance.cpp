#include "lv/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "lv/analyze.hpp"
#include "lv/integrate.hpp"
#include "lv/periodic.hpp"
#include "lv/problem.hpp"
#include "lv/random_fields.hpp"
#include "lv/report.hpp"
#include "lv/spectral.hpp"
#include "lv/threshold.hpp"

namespace lv::accept {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

ProblemSpec constant_spec(double a, double b1, double b2, double c1, double c2,
                          BoundaryKind bc, std::array<double, 2> lo = {0.0, 0.0},
                          std::array<double, 2> hi = {1.0, 1.0}) {
  ProblemSpec spec;
  spec.dim = 1;
  spec.lo = lo;
  spec.hi = hi;
  spec.bc = bc;
  spec.a1 = CoefficientField::constant(a);
  spec.a2 = CoefficientField::constant(a);
  spec.b1 = CoefficientField::constant(b1);
  spec.b2 = CoefficientField::constant(b2);
  spec.c1 = CoefficientField::constant(c1);
  spec.c2 = CoefficientField::constant(c2);
  return spec;
}

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << "FAILED " << what;
    }
  }
  void note(const std::string& what) {
    if (detail.tellp() > 0) detail << "; ";
    detail << what;
  }
};

// ---------------------------------------------------------------------------
// 1. Blow-up rate for varied constant coefficients, with dt-halving
//    self-consistency of T_est.
CriterionResult criterion_rate() {
  Check c;
  const double sets[5][4] = {{1.0, 1.0, 3.0, 3.0},
                             {1.0, 2.0, 3.0, 2.0},
                             {2.0, 1.0, 4.0, 2.0},
                             {1.5, 1.5, 2.0, 2.5},
                             {1.0, 1.0, 2.0, 2.0}};
  StepControls ctl;
  ctl.dt_max = 1e-4;
  ctl.dt_init = ctl.dt_max;
  ctl.dt_min = 1e-9;
  ctl.theta = 0.1;
  ctl.blow_norm_cap = 1e6;
  ctl.snapshot_every = 1 << 20;  // the rate fit only needs the norm series

  double worst_slope_dev = 0.0, worst_t_dev = 0.0;
  for (const auto& s : sets) {
    ProblemSpec spec = constant_spec(0.0, s[0], s[1], s[2], s[3],
                                     BoundaryKind::Dirichlet);
    GridPtr grid = spec.grid_for({512, 1});
    const Field profile = make_profile(grid, ProfileKind::SineProduct);
    SolveOutcome full = classify_run(spec, grid, 60.0, profile, kInf, ctl);
    StepControls half = ctl;
    half.dt_max /= 2.0;
    half.dt_init = half.dt_max;
    SolveOutcome halved = classify_run(spec, grid, 60.0, profile, kInf, half);
    c.require(full.kind == OutcomeKind::BlowUp && full.fit_ok,
              "run classifies BlowUp with a valid fit");
    if (full.kind != OutcomeKind::BlowUp || !full.fit_ok) break;
    c.require(full.fit_slope >= -1.15 && full.fit_slope <= -0.85,
              "slope in [-1.15, -0.85] (got " + fmt17(full.fit_slope) + ")");
    const double t_dev = std::abs(full.t_est - halved.t_est) / halved.t_est;
    c.require(t_dev < 0.01, "T_est self-consistency (got " + fmt17(t_dev) + ")");
    worst_slope_dev = std::max(worst_slope_dev, std::abs(full.fit_slope + 1.0));
    worst_t_dev = std::max(worst_t_dev, t_dev);
  }
  c.note("worst |slope+1|=" + fmt17(worst_slope_dev) +
         ", worst dT/T=" + fmt17(worst_t_dev));
  return {1, "blow-up rate, 5 Dirichlet runs, slope and T_est consistency",
          c.pass, c.detail.str(), 0.0};
}

// ---------------------------------------------------------------------------
// 2. Homogeneous Neumann run against the exact solution u(t) = 1/(1-2t).
CriterionResult criterion_homogeneous_oracle() {
  Check c;
  ProblemSpec spec = constant_spec(0.0, 1.0, 1.0, 3.0, 3.0, BoundaryKind::Neumann);
  GridPtr grid = spec.grid_for({8, 1});
  StepControls ctl;
  ctl.dt_max = 2.5e-5;
  ctl.dt_init = ctl.dt_max;
  ctl.dt_min = 1e-9;
  ctl.blow_norm_cap = 1e6;
  ctl.snapshot_every = 1 << 20;

  State s0(grid, 0.0);
  std::fill(s0.u.v.begin(), s0.u.v.end(), 1.0);
  std::fill(s0.v.v.begin(), s0.v.v.end(), 1.0);

  const State at04 = evolve_to_time(spec, s0, 0.4, ctl);
  const double exact = 1.0 / (1.0 - 2.0 * 0.4);
  const double rel = std::abs(max_norm(at04.u) - exact) / exact;
  c.require(rel < 1e-3, "u(0.4) relative error < 1e-3 (got " + fmt17(rel) + ")");

  const SolveOutcome out = evolve(spec, s0, kInf, ctl);
  c.require(out.kind == OutcomeKind::BlowUp && out.fit_ok, "run blows up with a fit");
  const double t_dev = std::abs(out.t_est - 0.5);
  c.require(t_dev < 5e-3, "|T_est - 0.5| < 5e-3 (got " + fmt17(t_dev) + ")");
  c.note("rel(0.4)=" + fmt17(rel) + ", T_est=" + fmt17(out.t_est));
  return {2, "exact homogeneous oracle u(t)=1/(1-2t)", c.pass, c.detail.str(), 0.0};
}

// ---------------------------------------------------------------------------
// 3. Proportionality deficit decays monotonically below 0.05 on random
//    constant-coefficient homogeneous runs.
CriterionResult criterion_proportionality() {
  Check c;
  std::mt19937_64 rng(20240803ull);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_final = 0.0;
  for (int run = 0; run < 10; ++run) {
    const double b1 = 0.5 + unit(rng);
    const double b2 = 0.5 + unit(rng);
    const double c_lo = std::sqrt(1.5 * 1.5 + 0.5);
    const double c1 = c_lo + (4.0 - c_lo) * unit(rng);
    const double c2 = c_lo + (4.0 - c_lo) * unit(rng);
    ProblemSpec spec = constant_spec(0.0, b1, b2, c1, c2, BoundaryKind::Neumann);
    GridPtr grid = spec.grid_for({8, 1});
    const double K = proportionality_constant(b1, b2, c1, c2, 1.0);
    // Start on the side of the manifold matched to the sign of the splitting
    // drift, so the absolute deficit decays through the whole run.
    const double drift = c1 * b2 - c2 * b1 * K * K;
    const double eta = drift >= 0.0 ? 0.55 : 1.0 / 0.55;
    State s0(grid, 0.0);
    std::fill(s0.u.v.begin(), s0.u.v.end(), 1.0);
    std::fill(s0.v.v.begin(), s0.v.v.end(), eta / K);

    StepControls ctl;
    ctl.dt_max = 5e-2;  // adaptive from the first step: theta/L < dt_max
    ctl.dt_init = ctl.dt_max;
    ctl.dt_min = 1e-9;
    ctl.theta = 0.05;
    ctl.blow_norm_cap = 1e3;
    ctl.snapshot_every = 1 << 20;
    const SolveOutcome out = evolve(spec, s0, kInf, ctl);
    c.require(out.kind == OutcomeKind::BlowUp, "run " + std::to_string(run) + " blows up");

    double prev = kInf;
    double final_deficit = kInf;
    bool monotone = true;
    for (const auto& ns : out.samples) {
      if (ns.norm_sum > 1e3) break;
      const double deficit = std::abs(ns.norm_u - K * ns.norm_v) /
                             (ns.norm_u + K * ns.norm_v);
      if (deficit > prev * (1.0 + 1e-3) + 1e-8) monotone = false;
      prev = deficit;
      final_deficit = deficit;
    }
    c.require(monotone, "run " + std::to_string(run) + " deficit nonincreasing");
    c.require(final_deficit < 0.05, "run " + std::to_string(run) +
                                        " deficit < 0.05 before norm 1e3 (got " +
                                        fmt17(final_deficit) + ")");
    worst_final = std::max(worst_final, final_deficit);
  }
  c.note("worst final deficit=" + fmt17(worst_final));
  return {3, "proportionality deficit decay on 10 random homogeneous runs",
          c.pass, c.detail.str(), 0.0};
}

// ---------------------------------------------------------------------------
// 4. Invariant manifold u = K v with a1 = a2: deficit below 1e-6 for the
//    whole run. Parameter sets satisfy b2 = b1 K and c1 = c2 K, where the
//    split update preserves the manifold exactly.
CriterionResult criterion_invariant_manifold() {
  Check c;
  struct Set {
    double b1, c2, K, a;
  };
  const Set sets[5] = {{1.0, 3.0, 1.0, 0.0},
                       {2.0, 4.0, 0.5, 0.5},
                       {1.0, 3.0, 2.0, -0.5},
                       {1.2, 2.2, 1.5, 0.25},
                       {2.5, 3.75, 0.8, -1.0}};
  double worst = 0.0;
  for (const auto& s : sets) {
    const double b2 = s.b1 * s.K, c1 = s.c2 * s.K;
    // Config-time identity behind K's definition.
    const double K = proportionality_constant(s.b1, b2, c1, s.c2, 1.0);
    c.require(std::abs((c1 - s.b1 * K) - (s.c2 * K - b2)) <
                  1e-12 * (c1 + s.b1 * K),
              "c1 - b1 K = c2 K - b2");
    ProblemSpec spec = constant_spec(s.a, s.b1, b2, c1, s.c2, BoundaryKind::Neumann);
    GridPtr grid = spec.grid_for({8, 1});
    State s0(grid, 0.0);
    std::fill(s0.u.v.begin(), s0.u.v.end(), s.K);
    std::fill(s0.v.v.begin(), s0.v.v.end(), 1.0);

    StepControls ctl;
    ctl.dt_max = 1e-3;
    ctl.dt_init = ctl.dt_max;
    ctl.dt_min = 1e-9;
    ctl.blow_norm_cap = 1e6;
    ctl.snapshot_every = 1 << 20;
    const SolveOutcome out = evolve(spec, s0, kInf, ctl);
    c.require(out.kind == OutcomeKind::BlowUp, "manifold run blows up");
    double peak = 0.0;
    for (const auto& ns : out.samples) {
      const double deficit = std::abs(ns.norm_u - K * ns.norm_v) /
                             (ns.norm_u + K * ns.norm_v);
      peak = std::max(peak, deficit);
    }
    c.require(peak < 1e-6,
              "deficit < 1e-6 whole run (got " + fmt17(peak) + ")");
    worst = std::max(worst, peak);
  }
  c.note("worst deficit=" + fmt17(worst));
  return {4, "invariant manifold u = K v, 5 parameter sets", c.pass,
          c.detail.str(), 0.0};
}

// ---------------------------------------------------------------------------
// 5. Universal-bound statistic over a seeded class ensemble, stable between
//    N = 128 and N = 256.
CriterionResult criterion_bound_ensemble() {
  Check c;
  ProblemSpec base = constant_spec(0.0, 1.0, 1.0, 3.0, 3.0, BoundaryKind::Dirichlet);
  base.class_params = {0.5, 4.0, 50.0};
  const int members = 32;
  const std::uint64_t seed = 7;

  auto run_member = [&](int idx, int n) -> double {
    const EnsembleMember m = make_ensemble_member(base, seed, idx);
    GridPtr grid = m.spec.grid_for({n, 1});
    const ValidationReport rep = validate_problem(m.spec, *grid);
    if (!rep.valid()) return -1.0;
    StepControls ctl;
    ctl.dt_max = 2e-4;
    ctl.dt_init = ctl.dt_max;
    ctl.dt_min = 1e-9;
    ctl.blow_norm_cap = 1e6;
    ctl.snapshot_every = 1 << 20;
    const Field profile = make_profile(grid, ProfileKind::SineProduct);
    const SolveOutcome out = classify_run(m.spec, grid, m.alpha, profile, 1.0, ctl);
    const double T = out.kind == OutcomeKind::BlowUp && out.fit_ok
                         ? out.t_est
                         : out.horizon;
    return universal_bound_statistic(out, T, BoundRegime::BoundaryCondition).c_emp;
  };

  double c_emp[2] = {0.0, 0.0};
  for (int pass = 0; pass < 2; ++pass) {
    const int n = pass == 0 ? 128 : 256;
    std::vector<std::future<double>> futs;
    futs.reserve(members);
    for (int i = 0; i < members; ++i)
      futs.push_back(std::async(std::launch::async | std::launch::deferred,
                                run_member, i, n));
    for (int i = 0; i < members; ++i) {
      const double v = futs[i].get();
      if (v < 0.0) {
        c.require(false, "member " + std::to_string(i) + " passes validation");
        continue;
      }
      c_emp[pass] = std::max(c_emp[pass], v);
    }
  }
  c.require(std::isfinite(c_emp[0]) && std::isfinite(c_emp[1]) && c_emp[1] > 0.0,
            "C_emp finite");
  const double change = std::abs(c_emp[0] - c_emp[1]) / c_emp[1];
  c.require(change < 0.10,
            "refinement change < 10% (got " + fmt17(change) + ")");
  c.note("C_emp(128)=" + fmt17(c_emp[0]) + ", C_emp(256)=" + fmt17(c_emp[1]));
  return {5, "universal bound statistic, 32-member ensemble, N=128 vs 256",
          c.pass, c.detail.str(), 0.0};
}

// ---------------------------------------------------------------------------
// 6. Principal eigenvalue and the periodic adjoint pair.
CriterionResult criterion_eigen() {
  Check c;
  GridPtr grid = make_grid(1, {200, 1}, {0.0, 0.0}, {1.0, 1.0},
                           BoundaryKind::Dirichlet);
  const EigenPair ep = principal_eigenvalue(grid);
  const double h = grid->h[0];
  const double closed = (2.0 / (h * h)) * (1.0 - std::cos(kPi * h));
  c.require(std::abs(ep.value - closed) < 1e-8,
            "|Lambda - discrete closed form| < 1e-8 (got " +
                fmt17(std::abs(ep.value - closed)) + ")");
  const double rel_pi = std::abs(ep.value - kPi * kPi) / (kPi * kPi);
  c.require(rel_pi < 5e-4, "Lambda vs pi^2 within 5e-4 (got " + fmt17(rel_pi) + ")");

  const PeriodicEigenPair pep = adjoint_periodic_eigenpair(grid, 1.0);
  const double rel = std::abs(pep.value - ep.value) / ep.value;
  c.require(rel < 1e-8, "Lambda_1^T = Lambda_1 within 1e-8");
  c.require(pep.residual < 1e-6,
            "space-time residual < 1e-6 (got " + fmt17(pep.residual) + ")");
  c.require(pep.periodicity_defect == 0.0, "periodicity defect is zero");
  double min_phi = kInf;
  for (double v : pep.phi.slices[0]) min_phi = std::min(min_phi, v);
  c.require(min_phi > 0.0, "positive eigenfield");
  c.note("Lambda=" + fmt17(ep.value) + ", residual=" + fmt17(pep.residual));
  return {6, "principal eigenvalue and periodic adjoint pair", c.pass,
          c.detail.str(), 0.0};
}

// ---------------------------------------------------------------------------
// 7. Periodic linear solve: two analytic cases, the zero case, linearity.
CriterionResult criterion_periodic_solve() {
  Check c;
  GridPtr grid = make_grid(1, {256, 1}, {0.0, 0.0}, {1.0, 1.0},
                           BoundaryKind::Dirichlet);
  const double T = 1.0;
  const int nt = 10000;  // dt = 1e-4

  {
    const SpaceTimeField zero(grid, T, nt);
    const PeriodicSolve w = periodic_linear_solve(zero);
    c.require(w.w.max_norm() <= 1e-14, "f = 0 gives w = 0");
  }
  {
    auto f = SpaceTimeField::from(
        grid, T, nt, [](double x, double, double) { return std::sin(kPi * x); });
    const PeriodicSolve w = periodic_linear_solve(f);
    double err = 0.0;
    for (int j = 0; j <= nt; ++j)
      for (int i = 0; i < grid->n[0]; ++i)
        err = std::max(err, std::abs(w.w.slices[j][i] -
                                     std::sin(kPi * grid->coords[0][i]) /
                                         (kPi * kPi)));
    c.require(err < 1e-3, "steady case within 1e-3 (got " + fmt17(err) + ")");
    c.note("steady err=" + fmt17(err));
  }
  {
    const double om = 2.0 * kPi / T;
    auto f = SpaceTimeField::from(grid, T, nt, [om](double x, double, double t) {
      return std::sin(kPi * x) * std::cos(om * t);
    });
    const PeriodicSolve w = periodic_linear_solve(f);
    const double p2 = kPi * kPi;
    double err = 0.0;
    for (int j = 0; j <= nt; ++j) {
      const double t = f.time(j);
      const double amp = (p2 * std::cos(om * t) + om * std::sin(om * t)) /
                         (p2 * p2 + om * om);
      for (int i = 0; i < grid->n[0]; ++i)
        err = std::max(err, std::abs(w.w.slices[j][i] -
                                     std::sin(kPi * grid->coords[0][i]) * amp));
    }
    c.require(err < 1e-3, "oscillating case within 1e-3 (got " + fmt17(err) + ")");
    c.note("oscillating err=" + fmt17(err));
  }
  {
    // Linearity on random low-mode forcings.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double a1 = unit(rng), a2 = unit(rng), p1 = unit(rng), p2 = unit(rng);
    auto f1 = SpaceTimeField::from(grid, T, nt, [&](double x, double, double t) {
      return a1 * std::sin(kPi * x) * std::cos(2 * kPi * t + p1) +
             0.3 * std::sin(2 * kPi * x);
    });
    auto f2 = SpaceTimeField::from(grid, T, nt, [&](double x, double, double t) {
      return a2 * std::sin(3 * kPi * x) + 0.2 * std::sin(kPi * x) * std::sin(2 * kPi * t + p2);
    });
    const double al = 0.7, be = -1.3;
    SpaceTimeField fc(grid, T, nt);
    for (int j = 0; j <= nt; ++j)
      for (std::size_t k = 0; k < grid->size(); ++k)
        fc.slices[j][k] = al * f1.slices[j][k] + be * f2.slices[j][k];
    const PeriodicSolve w1 = periodic_linear_solve(f1);
    const PeriodicSolve w2 = periodic_linear_solve(f2);
    const PeriodicSolve wc = periodic_linear_solve(fc);
    double err = 0.0, scale = 0.0;
    for (int j = 0; j <= nt; ++j)
      for (std::size_t k = 0; k < grid->size(); ++k) {
        const double combo = al * w1.w.slices[j][k] + be * w2.w.slices[j][k];
        err = std::max(err, std::abs(wc.w.slices[j][k] - combo));
        scale = std::max(scale, std::abs(combo));
      }
    c.require(err <= 1e-12 * std::max(scale, 1.0),
              "linearity to 1e-12 (got " + fmt17(err) + ")");
  }
  return {7, "periodic linear solve: analytic cases and linearity", c.pass,
          c.detail.str(), 0.0};
}

ProblemSpec periodic_orbit_spec() {
  ProblemSpec spec = constant_spec(0.0, 1.0, 1.0, 3.0, 3.0, BoundaryKind::Dirichlet);
  spec.a1 = CoefficientField::expression("-1 + 0.5*sin(6.2831853071795865*t)");
  spec.a2 = spec.a1;
  spec.period = 1.0;
  return spec;
}

// ---------------------------------------------------------------------------
// 8. Positive periodic orbit for time-periodic a(t), with 3-period
//    re-simulation.
CriterionResult criterion_periodic_orbit() {
  Check c;
  ProblemSpec spec = periodic_orbit_spec();
  GridPtr grid = spec.grid_for({200, 1});
  OrbitOptions opt;
  opt.map.nt = 500;
  opt.tol = 1e-9;
  const State guess = default_orbit_guess(spec, grid);
  const OrbitSearch search =
      find_periodic_orbit(spec, guess, 1.0, OrbitMethod::NewtonKrylov, opt);
  c.require(search.status == OrbitStatus::Converged,
            std::string("orbit search converged (status ") +
                to_string(search.status) + ", " + search.note + ")");
  if (search.status == OrbitStatus::Converged) {
    c.require(search.orbit.residual < 1e-6,
              "periodicity residual < 1e-6 (got " + fmt17(search.orbit.residual) + ")");
    c.require(search.orbit.positivity_margin > 0.0,
              "positivity margin > 0 (got " + fmt17(search.orbit.positivity_margin) + ")");
    // Re-simulate three periods from the converged phase-0 state.
    State s = search.orbit.snapshots.front();
    PoincareOptions mp = opt.map;
    bool diverged = false;
    for (int p = 0; p < 3; ++p) {
      PoincareResult pr = poincare_map(spec, s, 1.0, mp);
      if (pr.diverged) {
        diverged = true;
        break;
      }
      s = pr.end;
      s.t = 0.0;
    }
    c.require(!diverged, "3-period re-simulation stays finite");
    if (!diverged) {
      const State& x0 = search.orbit.snapshots.front();
      double num = 0.0, den = 1e-300;
      for (std::size_t k = 0; k < s.u.v.size(); ++k) {
        num = std::max({num, std::abs(s.u.v[k] - x0.u.v[k]),
                        std::abs(s.v.v[k] - x0.v.v[k])});
        den = std::max({den, std::abs(x0.u.v[k]), std::abs(x0.v.v[k])});
      }
      const double r3 = num / den;
      c.require(r3 < 3e-6,
                "3-period return within 3x the residual tolerance (got " +
                    fmt17(r3) + ")");
      c.note("residual=" + fmt17(search.orbit.residual) + ", margin=" +
             fmt17(search.orbit.positivity_margin) + ", r3=" + fmt17(r3) +
             ", sup=" + fmt17(search.orbit.sup_norm));
    }
  }
  return {8, "positive periodic orbit for a(t) = -1 + 0.5 sin(2 pi t)", c.pass,
          c.detail.str(), 0.0};
}

// ---------------------------------------------------------------------------
// 9. Homotopy endpoint lambda = 0: no nontrivial orbit from 20 seeds;
//    adjoint-weighted integral grows.
CriterionResult criterion_homotopy_endpoint() {
  Check c;
  ProblemSpec spec = periodic_orbit_spec();
  GridPtr grid = spec.grid_for({100, 1});
  OrbitOptions opt;
  opt.map.nt = 250;
  opt.map.blow_cap = 1e7;
  opt.max_outer = 60;
  opt.damping = 0.5;

  const EigenPair ep = principal_eigenvalue(grid);
  int diverged = 0, trivial = 0, other = 0;
  for (int seedi = 0; seedi < 20; ++seedi) {
    std::mt19937_64 rng(derive_seed(99, seedi));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double beta = 0.05 * std::pow(200.0, unit(rng));  // 0.05 .. 10
    State guess(grid, 0.0);
    for (std::size_t k = 0; k < grid->size(); ++k) {
      const double wob = 1.0 + 0.3 * std::sin(7.0 * grid->coords[0][k] + seedi);
      guess.u.v[k] = beta * ep.phi.v[k] * wob;
      guess.v.v[k] = beta * ep.phi.v[k] * (2.0 - wob);
    }
    const OrbitSearch search = find_periodic_orbit(
        spec, guess, 0.0, OrbitMethod::DampedFixedPoint, opt);
    if (search.status == OrbitStatus::Diverged) ++diverged;
    else if (search.status == OrbitStatus::ConvergedTrivial) ++trivial;
    else ++other;
    c.require(search.status != OrbitStatus::Converged,
              "seed " + std::to_string(seedi) + " finds no nontrivial orbit");
  }
  c.note(std::to_string(diverged) + " diverged, " + std::to_string(trivial) +
         " collapsed, " + std::to_string(other) + " hit the iteration cap");
  c.require(other == 0, "every search resolves (diverges or collapses)");

  // Adjoint-weighted growth over consecutive periods.
  State s0(grid, 0.0);
  for (std::size_t k = 0; k < grid->size(); ++k) {
    s0.u.v[k] = 0.05 * ep.phi.v[k];
    s0.v.v[k] = 0.05 * ep.phi.v[k];
  }
  PoincareOptions mp;
  mp.nt = 250;
  const std::vector<double> growth = adjoint_weighted_growth(spec, s0, 3, mp);
  c.require(growth.size() >= 2, "two periods integrate without blow-up");
  if (growth.size() >= 2) {
    const double ratio = growth[1] / growth[0];
    c.require(ratio > 1.0, "adjoint integral grows per period (got " + fmt17(ratio) + ")");
    c.note("growth ratio=" + fmt17(ratio) + " (e^T=" + fmt17(std::exp(1.0)) + ")");
  }
  return {9, "lambda = 0 endpoint: no orbit from 20 seeds, adjoint growth",
          c.pass, c.detail.str(), 0.0};
}

// ---------------------------------------------------------------------------
// 10. Threshold bisection with monotone classifications and a
//     refinement-stable statistic for the last Global run.
CriterionResult criterion_threshold() {
  Check c;
  ProblemSpec spec = constant_spec(0.0, 1.0, 1.0, 3.0, 3.0, BoundaryKind::Dirichlet);
  StepControls ctl;
  ctl.dt_max = 2e-4;
  ctl.dt_init = ctl.dt_max;
  ctl.dt_min = 1e-9;
  ctl.blow_norm_cap = 1e6;
  ctl.snapshot_every = 1 << 20;

  GridPtr grid = spec.grid_for({128, 1});
  const ThresholdResult res =
      bisect_threshold(spec, grid, 0.5, 80.0, 1e-3, 1.5, ctl);
  c.require(res.alpha_hi - res.alpha_lo <= 1e-3 * res.alpha_hi,
            "bracket relative width <= 1e-3");
  double max_global = -kInf, min_blowup = kInf;
  double prev_test = kInf;
  bool t_monotone = true;
  for (const auto& e : res.history) {
    if (e.outcome == OutcomeKind::Global) max_global = std::max(max_global, e.alpha);
    if (e.outcome == OutcomeKind::BlowUp) min_blowup = std::min(min_blowup, e.alpha);
  }
  c.require(max_global < min_blowup, "classifications monotone in alpha");
  // T_est nonincreasing in alpha over the blow-up runs.
  std::vector<std::pair<double, double>> blowups;
  for (const auto& e : res.history)
    if (e.outcome == OutcomeKind::BlowUp) blowups.push_back({e.alpha, e.t_est});
  std::sort(blowups.begin(), blowups.end());
  for (const auto& [alpha, t_est] : blowups) {
    (void)alpha;
    if (t_est > prev_test * (1.0 + 1e-6)) t_monotone = false;
    prev_test = t_est;
  }
  c.require(t_monotone, "T_est nonincreasing in alpha");

  // Refinement stability of the near-threshold Global statistic (T = inf).
  const double alpha_star = res.alpha_lo;
  double stats[2] = {0.0, 0.0};
  for (int pass = 0; pass < 2; ++pass) {
    GridPtr g = spec.grid_for({pass == 0 ? 128 : 256, 1});
    const Field profile = make_profile(g, ProfileKind::SineProduct);
    const SolveOutcome run = classify_run(spec, g, alpha_star, profile, 6.0, ctl);
    c.require(run.kind == OutcomeKind::Global,
              "near-threshold run stays Global at N=" +
                  std::to_string(g->n[0]));
    stats[pass] =
        universal_bound_statistic(run, kInf, BoundRegime::BoundaryCondition).c_emp;
  }
  const double change = std::abs(stats[0] - stats[1]) / std::max(stats[1], 1e-300);
  c.require(std::isfinite(stats[0]) && std::isfinite(stats[1]), "statistic finite");
  c.require(change < 0.10, "statistic refinement-stable within 10% (got " +
                               fmt17(change) + ")");
  c.note("bracket=[" + fmt17(res.alpha_lo) + ", " + fmt17(res.alpha_hi) +
         "], undecided=" + std::to_string(res.undecided_count) +
         ", stat(128)=" + fmt17(stats[0]) + ", stat(256)=" + fmt17(stats[1]));
  return {10, "threshold bisection and bounded threshold statistic", c.pass,
          c.detail.str(), 0.0};
}

// ---------------------------------------------------------------------------
// 11. Scaling invariance: residual at lambda = 2 small and shrinking under
//     refinement.
CriterionResult criterion_scaling() {
  Check c;
  ProblemSpec spec = constant_spec(0.0, 1.0, 1.0, 3.0, 3.0, BoundaryKind::None,
                                   {-8.0, 0.0}, {8.0, 1.0});
  StepControls ctl;
  ctl.dt_max = 2e-5;
  ctl.dt_init = ctl.dt_max;
  ctl.dt_min = 1e-10;
  ctl.blow_norm_cap = 1e6;
  ctl.snapshot_every = 200;
  ctl.max_snapshots = 4000;

  double residuals[2] = {0.0, 0.0};
  for (int pass = 0; pass < 2; ++pass) {
    const int n = pass == 0 ? 512 : 1024;
    GridPtr grid = spec.grid_for({n, 1});
    State s0(grid, 0.0);
    for (int i = 0; i < grid->n[0]; ++i) {
      const double x = grid->coords[0][i];
      s0.u.v[i] = std::exp(-0.5 * x * x);
      s0.v.v[i] = s0.u.v[i];
    }
    const SolveOutcome traj = evolve(spec, s0, 0.3, ctl);
    // Snapshots nearest t = 0.08 and t = 0.16.
    int ia = -1, ib = -1;
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      if (ia < 0 && traj.snapshots[k].t >= 0.08) ia = static_cast<int>(k);
      if (ib < 0 && traj.snapshots[k].t >= 0.16) ib = static_cast<int>(k);
    }
    c.require(ia >= 0 && ib > ia, "snapshots available");
    residuals[pass] = scaling_residual(spec, traj, 2.0, ctl, {0.0, 0.0}, ia, ib);
  }
  c.require(residuals[0] < 1e-2,
            "residual < 1e-2 at N=512 (got " + fmt17(residuals[0]) + ")");
  const double gain = residuals[0] / std::max(residuals[1], 1e-300);
  c.require(gain >= 3.5, "residual shrinks by >= 3.5x at N=1024 (got " +
                             fmt17(gain) + "x)");
  c.note("res(512)=" + fmt17(residuals[0]) + ", res(1024)=" + fmt17(residuals[1]) +
         ", gain=" + fmt17(gain));
  return {11, "scaling invariance residual at lambda = 2", c.pass,
          c.detail.str(), 0.0};
}

}  // namespace

std::vector<CriterionResult> run_all(std::ostream& log,
                                     const std::vector<int>& only) {
  using Runner = CriterionResult (*)();
  const Runner runners[] = {
      criterion_rate,           criterion_homogeneous_oracle,
      criterion_proportionality, criterion_invariant_manifold,
      criterion_bound_ensemble, criterion_eigen,
      criterion_periodic_solve, criterion_periodic_orbit,
      criterion_homotopy_endpoint, criterion_threshold,
      criterion_scaling};
  std::vector<CriterionResult> results;
  for (int i = 0; i < static_cast<int>(std::size(runners)); ++i) {
    const int index = i + 1;
    if (!only.empty() &&
        std::find(only.begin(), only.end(), index) == only.end())
      continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = runners[i]();
    } catch (const std::exception& e) {
      res.index = index;
      res.name = "criterion " + std::to_string(index);
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    log << (res.pass ? "[PASS] " : "[FAIL] ") << res.index << ". " << res.name
        << " (" << fmt17(res.seconds) << " s)";
    if (!res.detail.empty()) log << " -- " << res.detail;
    log << "\n" << std::flush;
    results.push_back(std::move(res));
  }
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return !results.empty();
}

}  // namespace lv::accept
