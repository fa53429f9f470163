#include "lv/threshold.hpp"

#include <cmath>
#include <limits>

#include "lv/errors.hpp"

namespace lv {

const char* to_string(ProfileKind p) {
  switch (p) {
    case ProfileKind::SineProduct: return "sine";
    case ProfileKind::Gaussian: return "gaussian";
    case ProfileKind::Constant: return "constant";
  }
  return "?";
}

Field make_profile(GridPtr grid, ProfileKind kind) {
  const Grid& g = *grid;
  constexpr double pi = 3.14159265358979323846;
  switch (kind) {
    case ProfileKind::SineProduct:
      if (g.dim == 1) {
        const double L = g.hi[0] - g.lo[0];
        return field_from(grid, [&](double x) {
          return std::sin(pi * (x - g.lo[0]) / L);
        });
      }
      return field_from(grid, [&](double x, double y) {
        return std::sin(pi * (x - g.lo[0]) / (g.hi[0] - g.lo[0])) *
               std::sin(pi * (y - g.lo[1]) / (g.hi[1] - g.lo[1]));
      });
    case ProfileKind::Gaussian: {
      const double cx = 0.5 * (g.lo[0] + g.hi[0]);
      const double sx = (g.hi[0] - g.lo[0]) / 8.0;
      if (g.dim == 1) {
        return field_from(grid, [&](double x) {
          const double d = (x - cx) / sx;
          return std::exp(-0.5 * d * d);
        });
      }
      const double cy = 0.5 * (g.lo[1] + g.hi[1]);
      const double sy = (g.hi[1] - g.lo[1]) / 8.0;
      return field_from(grid, [&](double x, double y) {
        const double dx = (x - cx) / sx, dy = (y - cy) / sy;
        return std::exp(-0.5 * (dx * dx + dy * dy));
      });
    }
    case ProfileKind::Constant: return Field(grid, 1.0);
  }
  return Field(grid);
}

SolveOutcome classify_run(const ProblemSpec& spec, GridPtr grid, double alpha,
                          const Field& profile, double horizon,
                          const StepControls& controls, double v_scale) {
  if (alpha < 0.0) throw ParameterError("classify_run: alpha must be >= 0");
  State s0(grid, 0.0);
  for (std::size_t k = 0; k < profile.v.size(); ++k) {
    s0.u.v[k] = alpha * profile.v[k];
    s0.v.v[k] = v_scale * alpha * profile.v[k];
  }
  return evolve(spec, s0, horizon, controls);
}

ThresholdResult bisect_threshold(const ProblemSpec& spec, GridPtr grid,
                                 double alpha_lo, double alpha_hi, double tol,
                                 double horizon, const StepControls& controls,
                                 ProfileKind profile_kind) {
  if (!(alpha_lo < alpha_hi))
    throw ParameterError("bisect_threshold: need alpha_lo < alpha_hi");
  const Field profile = make_profile(grid, profile_kind);

  auto classify_with_doubling = [&](double alpha, ThresholdHistoryEntry& e) {
    double h = horizon;
    SolveOutcome out;
    for (;;) {
      out = classify_run(spec, grid, alpha, profile, h, controls);
      if (out.kind != OutcomeKind::Undecided || h >= 4.0 * horizon) break;
      h *= 2.0;
    }
    e.alpha = alpha;
    e.outcome = out.kind;
    e.t_est = out.kind == OutcomeKind::BlowUp ? out.t_est : 0.0;
    e.horizon = h;
    e.forced_upper = false;
    return out;
  };

  ThresholdResult result;
  {
    ThresholdHistoryEntry e;
    const SolveOutcome lo = classify_with_doubling(alpha_lo, e);
    result.history.push_back(e);
    if (lo.kind != OutcomeKind::Global)
      throw ParameterError("bisect_threshold: lower endpoint must classify Global");
    ThresholdHistoryEntry e2;
    const SolveOutcome hi = classify_with_doubling(alpha_hi, e2);
    result.history.push_back(e2);
    if (hi.kind != OutcomeKind::BlowUp)
      throw ParameterError("bisect_threshold: upper endpoint must classify BlowUp");
  }

  double lo = alpha_lo, hi = alpha_hi;
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    ThresholdHistoryEntry e;
    const SolveOutcome out = classify_with_doubling(mid, e);
    if (out.kind == OutcomeKind::BlowUp) {
      hi = mid;
    } else if (out.kind == OutcomeKind::Global) {
      lo = mid;
    } else {
      // Still undecided after the horizon cap: the true threshold run is
      // global, so a finite-horizon misread lands on the blow-up side.
      e.forced_upper = true;
      ++result.undecided_count;
      hi = mid;
    }
    result.history.push_back(e);
  }
  result.alpha_lo = lo;
  result.alpha_hi = hi;

  // Diagnostics of the deepest Global run: the universal-bound statistic in
  // the boundary-condition regime with the T = infinity convention.
  double best_alpha = -1.0;
  for (const auto& e : result.history)
    if (e.outcome == OutcomeKind::Global) best_alpha = std::max(best_alpha, e.alpha);
  if (best_alpha >= 0.0) {
    const SolveOutcome run =
        classify_run(spec, grid, best_alpha, profile, 4.0 * horizon, controls);
    result.threshold_statistic = universal_bound_statistic(
        run, std::numeric_limits<double>::infinity(),
        BoundRegime::BoundaryCondition);
    result.statistic_valid = true;
  }
  return result;
}

}  // namespace lv
