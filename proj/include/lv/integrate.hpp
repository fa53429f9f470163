#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lv/problem.hpp"
#include "lv/state.hpp"

namespace lv {

/// Time-step controls for evolve(). The step size is
/// min(dt_max, theta / L(state)) clamped to [dt_min, dt_max], where L is the
/// max pointwise reaction-Jacobian diagonal estimate.
struct StepControls {
  double dt_init = 1e-3;
  double dt_min = 1e-9;
  double dt_max = 1e-3;
  double theta = 0.1;              // safety factor in (0, 1)
  double blow_norm_cap = 1e6;      // M_blow
  double quiescence_cap = 0.0;     // 0 -> blow_norm_cap / 10
  int snapshot_every = 50;         // accepted steps between stored snapshots
  int max_snapshots = 500;
  long max_steps = 2'000'000;
  std::size_t max_samples = 200'000;

  void validate() const;
  double effective_quiescence_cap() const {
    return quiescence_cap > 0.0 ? quiescence_cap : blow_norm_cap / 10.0;
  }
};

/// One per-step record of the trajectory summary.
struct NormSample {
  double t;
  double norm_u;
  double norm_v;
  double norm_sum;  // max over x of u + v
  double mass_u;
  double mass_v;
  std::uint32_t argmax;  // grid index attaining norm_sum
};

enum class OutcomeKind { Global, BlowUp, Undecided };

const char* to_string(OutcomeKind k);

/// Classification of a run with diagnostics and the sampled trajectory.
struct SolveOutcome {
  OutcomeKind kind = OutcomeKind::Undecided;
  double t_end = 0.0;
  double horizon = 0.0;
  double peak_norm = 0.0;
  // Blow-up data (valid when kind == BlowUp).
  double t_est = 0.0;
  double fit_slope = 0.0;
  double fit_r2 = 0.0;
  bool fit_ok = false;
  std::string undecided_reason;
  long steps = 0;
  long dt_floor_hits = 0;
  std::vector<NormSample> samples;
  std::vector<State> snapshots;
};

/// One IMEX step: diffusion backward-Euler, reaction in a
/// positivity-preserving Patankar split (production terms explicit in the
/// numerator, loss terms implicit as denominators). Nonnegative input stays
/// nonnegative for any dt.
State step(const ProblemSpec& spec, const State& state, double dt);

/// Advances state0 until blow-up, the horizon, or a step/undecided budget.
/// Pass horizon = infinity to run until blow-up or the step budget.
SolveOutcome evolve(const ProblemSpec& spec, const State& state0,
                    double horizon, const StepControls& controls);

/// Steps the state with the evolve() controller until exactly time t_target
/// (the final step is shortened if needed). Returns the reached state.
State evolve_to_time(const ProblemSpec& spec, const State& state0,
                     double t_target, const StepControls& controls);

// --- checkpoint file (binary, little-endian) ---------------------------------
// Layout: magic "LVB1", u32 dim, u32 n per axis, f64 lo/hi per axis,
// f64 q, f64 r, f64 t, then u then v as f64 row-major.

void write_checkpoint(const std::string& path, const State& state, double q,
                      double r);

struct Checkpoint {
  State state;
  double q = 1.0;
  double r = 1.0;
};

/// The boundary handling is not part of the file; it comes from the spec used
/// to restart the run.
Checkpoint read_checkpoint(const std::string& path, BoundaryKind bc);

}  // namespace lv
