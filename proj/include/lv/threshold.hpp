#pragma once

#include <string>
#include <vector>

#include "lv/analyze.hpp"
#include "lv/integrate.hpp"
#include "lv/problem.hpp"

namespace lv {

enum class ProfileKind { SineProduct, Gaussian, Constant };

const char* to_string(ProfileKind p);

/// Fixed nonnegative shape with sup-norm one: a product of half-sine waves
/// for Dirichlet boxes, a centered Gaussian bump for whole-space emulation,
/// or a constant (homogeneous runs).
Field make_profile(GridPtr grid, ProfileKind kind);

/// Evolves data (alpha * profile, v_scale * alpha * profile) and returns the
/// outcome.
SolveOutcome classify_run(const ProblemSpec& spec, GridPtr grid, double alpha,
                          const Field& profile, double horizon,
                          const StepControls& controls, double v_scale = 1.0);

struct ThresholdHistoryEntry {
  double alpha;
  OutcomeKind outcome;
  double t_est;       // blow-up runs
  double horizon;     // horizon actually used (after any doubling)
  bool forced_upper;  // undecided midpoint counted toward the upper endpoint
};

struct ThresholdResult {
  double alpha_lo = 0.0;  // classified Global
  double alpha_hi = 0.0;  // classified BlowUp
  int undecided_count = 0;
  std::vector<ThresholdHistoryEntry> history;
  /// Universal-bound statistic of the last Global run, regime (1,0) with the
  /// T = infinity convention.
  BoundReport threshold_statistic;
  bool statistic_valid = false;
};

/// Bisects the borderline amplitude between global existence and blow-up.
/// Undecided midpoints double the horizon (up to 4x), then count toward the
/// upper endpoint with a warning flag.
ThresholdResult bisect_threshold(const ProblemSpec& spec, GridPtr grid,
                                 double alpha_lo, double alpha_hi, double tol,
                                 double horizon, const StepControls& controls,
                                 ProfileKind profile = ProfileKind::SineProduct);

}  // namespace lv
