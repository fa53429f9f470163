#pragma once

#include <array>
#include <string>
#include <vector>

#include "lv/integrate.hpp"
#include "lv/problem.hpp"

namespace lv {

/// Least-squares fit of log max(u+v) against log(T - t) over the trailing
/// decade of norm growth, with T chosen to maximize R^2.
struct RateFit {
  bool ok = false;
  std::string reason;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double t_est = 0.0;
  double window_t0 = 0.0;
  double window_t1 = 0.0;
  std::size_t window_size = 0;
};

RateFit fit_blowup_rate(const std::vector<NormSample>& samples);

/// Constant regimes of the universal estimate:
///   Interior          -> C1 = 1, C2 = 1 (no boundary condition assumed)
///   BoundaryCondition -> C1 = 1, C2 = 0 (Dirichlet/Neumann solutions)
///   ScaleInvariant    -> C1 = 0, C2 = 1 (a = 0, constant b, c)
enum class BoundRegime { Interior, BoundaryCondition, ScaleInvariant };

const char* to_string(BoundRegime r);
int bound_c1(BoundRegime r);
int bound_c2(BoundRegime r);

/// Empirical universal-bound statistic: the sup over sampled (x, t) of
/// (u+v) / (C1 + 1/t + 1/(T-t) + C2 dist^{-2}(x)), with the conventions
/// 1/(T-t) := 0 when T = infinity and dist^{-2} := 0 for whole-space
/// emulation. Points with dist < 2h are excluded in the ScaleInvariant
/// regime (the exclusion count is reported).
struct BoundReport {
  BoundRegime regime = BoundRegime::BoundaryCondition;
  double c_emp = 0.0;
  double argmax_t = 0.0;
  std::uint32_t argmax_index = 0;
  std::size_t samples_used = 0;
  std::size_t excluded_points = 0;
  /// Per-refinement values of c_emp, attached by refinement studies.
  std::vector<double> refinement_values;
};

BoundReport universal_bound_statistic(const SolveOutcome& run, double T,
                                      BoundRegime regime);

/// ||u - K v||_inf / ||u + K v||_inf.
double proportionality_deficit(const State& state, double K);

/// Rescales an early snapshot, re-evolves it for the rescaled duration, and
/// compares with the rescaled later snapshot. Returns the relative sup-norm
/// mismatch. Requires a scale-invariant spec (a = 0, constant b, c).
double scaling_residual(const ProblemSpec& spec, const SolveOutcome& traj,
                        double lambda, const StepControls& controls,
                        std::array<double, 2> x0 = {0.0, 0.0}, int snap_a = -1,
                        int snap_b = -1);

/// Constant-coefficient reaction ODE (no diffusion, a = 0):
///   u' = u^r (-b1 u^q + c1 v^q),  v' = v^r (-b2 v^q + c2 u^q).
struct OdeParams {
  double b1 = 1.0, b2 = 1.0, c1 = 3.0, c2 = 3.0;
  double q = 1.0, r = 1.0;
};

struct OdeValue {
  double u = 0.0, v = 0.0;
};

/// High-accuracy reference for the homogeneous reduction. On the manifold
/// u0 = K v0 (with r = 1) the closed form is returned; otherwise an embedded
/// Dormand-Prince integration at the given tolerance. Throws DomainError when
/// t reaches the blow-up time (the reached time is reported).
OdeValue ode_oracle(const OdeParams& p, double u0, double v0, double t,
                    double tol = 1e-12);

/// Blow-up time of the manifold closed form: 1/((p-1) c u0^(p-1)), p = q + r.
double ode_manifold_blowup_time(const OdeParams& p, double u0);

}  // namespace lv
