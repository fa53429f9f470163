#pragma once

#include <string>
#include <vector>

#include "lv/problem.hpp"
#include "lv/spectral.hpp"
#include "lv/state.hpp"

namespace lv {

/// Linear gain of the homotopy system, Lambda := Lambda_1^T + 1 on the grid.
double homotopy_gain(GridPtr grid, double period);

struct PoincareOptions {
  int nt = 0;            // steps per period; 0 derives ceil(T / dt_max)
  double dt_max = 2e-3;
  double blow_cap = 1e8;     // sup-norm divergence cutoff during the period
  double picard_tol = 1e-13; // per-step implicit solve tolerance
  int picard_max = 100;
  bool record = false;       // keep all nt + 1 snapshots
};

struct PoincareResult {
  State end;
  bool diverged = false;
  std::vector<State> trajectory;  // filled when options.record is set
};

/// Evolves the lambda-blended system
///   u_t - Lap u = lambda u(a1 - b1 u + c1 v) + (1-lambda)(Lambda u + K^3 v^2)
///   v_t - Lap v = lambda v(a2 - b2 v + c2 u) + (1-lambda)(Lambda v + u^2)
/// over exactly one period with fully implicit steps (Picard-resolved), where
/// K = (c1 + b2)/(c2 + b1) pointwise and Lambda = Lambda_1^T + 1. Requires
/// q = r = 1 and a time-periodic spec with a1, a2 < Lambda_1.
PoincareResult poincare_map(const ProblemSpec& spec, const State& state0,
                            double lambda, const PoincareOptions& options);

/// One application of the compact periodic-solution operator:
///   u' = K+( u (a1 - b1 u + c1 v) ),  v' = K+( v (a2 - b2 v + c2 u) ),
/// where K+ is the periodic linear solve followed by the positive part.
/// Fields are space-time functions over one period.
std::pair<SpaceTimeField, SpaceTimeField> apply_T_operator(
    const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& v);

enum class OrbitMethod { DampedFixedPoint, NewtonKrylov };
enum class OrbitStatus { Converged, ConvergedTrivial, Diverged, MaxIterations };

const char* to_string(OrbitStatus s);

struct OrbitOptions {
  PoincareOptions map;
  double tol = 1e-9;          // relative periodicity residual target
  int max_outer = 60;
  double damping = 0.5;       // damped fixed-point relaxation
  int gmres_restart = 40;
  int gmres_max = 200;
  double gmres_tol = 1e-10;
  double fd_eps = 1e-7;       // directional-derivative step scale
  double trivial_cutoff = 1e-4;  // times the coefficient scale
};

/// One period of a (candidate) time-periodic solution.
struct PeriodicOrbit {
  double lambda = 1.0;
  double period = 1.0;
  std::vector<State> snapshots;  // nt + 1 phases
  double residual = 0.0;         // ||x(T) - x(0)||_inf / ||x||_inf
  double positivity_margin = 0.0;
  double sup_norm = 0.0;         // max over the orbit of max(u + v)
  std::vector<double> convergence;  // residual history
};

struct OrbitSearch {
  OrbitStatus status = OrbitStatus::MaxIterations;
  PeriodicOrbit orbit;
  std::string note;
  int iterations = 0;
};

/// Default initial guess beta * (phi1, phi1 / Kbar) with Kbar the spatial
/// mean of K. beta <= 0 picks (Lambda_1 - mean a) / reduced-constant scale.
State default_orbit_guess(const ProblemSpec& spec, GridPtr grid, double beta = 0.0);

/// Solves P(x) = x for the Poincare map. Divergence and collapse to zero are
/// reported as results, not exceptions.
OrbitSearch find_periodic_orbit(const ProblemSpec& spec, const State& guess,
                                double lambda, OrbitMethod method,
                                const OrbitOptions& options);

struct SweepEntry {
  double lambda = 1.0;
  OrbitStatus status = OrbitStatus::MaxIterations;
  double residual = 0.0;
  double sup_norm = 0.0;
  double positivity_margin = 0.0;
};

/// Continuation over a lambda grid; each converged orbit seeds the next
/// search. Records where the branch stops yielding nontrivial orbits.
std::vector<SweepEntry> homotopy_sweep(const ProblemSpec& spec,
                                       const State& seed,
                                       const std::vector<double>& lambdas,
                                       const OrbitOptions& options);

/// Time-integrated adjoint-weighted mass of u over each of `periods`
/// consecutive periods of the lambda = 0 dynamics. Under the homotopy gain
/// Lambda = Lambda_1^T + 1 the ratio of consecutive entries is >= e^T for the
/// continuous problem.
std::vector<double> adjoint_weighted_growth(const ProblemSpec& spec,
                                            const State& state0, int periods,
                                            const PoincareOptions& options);

}  // namespace lv
