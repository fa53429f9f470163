#include "lv/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "lv/analyze.hpp"
#include "lv/errors.hpp"
#include "lv/linalg.hpp"

namespace lv {

void StepControls::validate() const {
  if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
    throw ParameterError("step controls need 0 < dt_min <= dt_init <= dt_max");
  if (!(theta > 0.0 && theta < 1.0))
    throw ParameterError("step controls need theta in (0, 1)");
  if (!(blow_norm_cap > 0.0))
    throw ParameterError("step controls need blow_norm_cap > 0");
}

const char* to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Global: return "Global";
    case OutcomeKind::BlowUp: return "BlowUp";
    case OutcomeKind::Undecided: return "Undecided";
  }
  return "?";
}

namespace {

// Samples the six coefficients on the grid, re-sampling only when some
// coefficient actually depends on t.
class CoeffSampler {
 public:
  CoeffSampler(const ProblemSpec& spec, const Grid& grid)
      : spec_(spec), grid_(grid), timedep_(spec.coefficients_depend_on_t()) {}

  void at(double t) {
    if (have_ && (!timedep_ || t == cached_t_)) return;
    spec_.a1.sample_on(grid_, t, a1);
    spec_.a2.sample_on(grid_, t, a2);
    spec_.b1.sample_on(grid_, t, b1);
    spec_.b2.sample_on(grid_, t, b2);
    spec_.c1.sample_on(grid_, t, c1);
    spec_.c2.sample_on(grid_, t, c2);
    cached_t_ = t;
    have_ = true;
  }

  std::vector<double> a1, a2, b1, b2, c1, c2;

 private:
  const ProblemSpec& spec_;
  const Grid& grid_;
  bool timedep_;
  bool have_ = false;
  double cached_t_ = 0.0;
};

class Stepper {
 public:
  Stepper(const ProblemSpec& spec, const Grid& grid)
      : spec_(spec), grid_(grid), coeffs_(spec, grid),
        quad_(spec.q == 1.0 && spec.r == 1.0) {}

  // Patankar-IMEX update of both components.
  void step(State& s, double dt) {
    const std::size_t n = grid_.size();
    coeffs_.at(s.t);
    prod_.resize(n);
    loss_.resize(n);
    rhs_.resize(n);

    const double p_exp = spec_.q + spec_.r - 1.0;
    // u component: production a1+ u + c1 u^r v^q, loss (a1- + b1 u^{q+r-1}) u.
    for (std::size_t k = 0; k < n; ++k) {
      const double u = s.u.v[k], v = s.v.v[k];
      const double a = coeffs_.a1[k];
      const double cross = quad_ ? u * v : std::pow(u, spec_.r) * std::pow(v, spec_.q);
      prod_[k] = std::max(a, 0.0) * u + coeffs_.c1[k] * cross;
      const double self = quad_ ? u : std::pow(u, p_exp);
      loss_[k] = dt * (std::max(-a, 0.0) + coeffs_.b1[k] * self);
      rhs_[k] = u + dt * prod_[k];
    }
    ShiftedLaplacian op{&grid_, 1.0, dt, &loss_};
    solve_shifted_laplacian(op, rhs_, unew_);

    for (std::size_t k = 0; k < n; ++k) {
      const double u = s.u.v[k], v = s.v.v[k];
      const double a = coeffs_.a2[k];
      const double cross = quad_ ? v * u : std::pow(v, spec_.r) * std::pow(u, spec_.q);
      prod_[k] = std::max(a, 0.0) * v + coeffs_.c2[k] * cross;
      const double self = quad_ ? v : std::pow(v, p_exp);
      loss_[k] = dt * (std::max(-a, 0.0) + coeffs_.b2[k] * self);
      rhs_[k] = v + dt * prod_[k];
    }
    solve_shifted_laplacian(op, rhs_, vnew_);

    s.u.v.swap(unew_);
    s.v.v.swap(vnew_);
    s.t += dt;
  }

  // Max pointwise magnitude of the reaction-Jacobian diagonal estimate.
  double reaction_scale(const State& s) {
    const std::size_t n = grid_.size();
    coeffs_.at(s.t);
    const double p = spec_.q + spec_.r;
    double L = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double sum = s.u.v[k] + s.v.v[k];
      const double amp = quad_ ? sum : std::pow(sum, p - 1.0);
      const double l1 = std::abs(coeffs_.a1[k]) + p * (coeffs_.b1[k] + coeffs_.c1[k]) * amp;
      const double l2 = std::abs(coeffs_.a2[k]) + p * (coeffs_.b2[k] + coeffs_.c2[k]) * amp;
      L = std::max(L, std::max(l1, l2));
    }
    return L;
  }

 private:
  const ProblemSpec& spec_;
  const Grid& grid_;
  CoeffSampler coeffs_;
  bool quad_;
  std::vector<double> prod_, loss_, rhs_, unew_, vnew_;
};

NormSample make_sample(const State& s) {
  NormSample ns{};
  ns.t = s.t;
  double nu = 0.0, nv = 0.0, nsum = 0.0, mu = 0.0, mv = 0.0;
  std::uint32_t arg = 0;
  for (std::size_t k = 0; k < s.u.v.size(); ++k) {
    const double u = s.u.v[k], v = s.v.v[k];
    nu = std::max(nu, u);
    nv = std::max(nv, v);
    const double sum = u + v;
    if (sum > nsum) {
      nsum = sum;
      arg = static_cast<std::uint32_t>(k);
    }
    mu += u;
    mv += v;
  }
  const double vol = s.grid()->cell_volume();
  ns.norm_u = nu;
  ns.norm_v = nv;
  ns.norm_sum = nsum;
  ns.mass_u = mu * vol;
  ns.mass_v = mv * vol;
  ns.argmax = arg;
  return ns;
}

void thin_samples(std::vector<NormSample>& samples) {
  // Keep the recent quarter dense, halve the density of the older part.
  const std::size_t split = samples.size() * 3 / 4;
  std::vector<NormSample> kept;
  kept.reserve(samples.size() / 2 + samples.size() - split + 1);
  for (std::size_t i = 0; i < split; i += 2) kept.push_back(samples[i]);
  for (std::size_t i = split; i < samples.size(); ++i) kept.push_back(samples[i]);
  samples.swap(kept);
}

}  // namespace

State step(const ProblemSpec& spec, const State& state, double dt) {
  if (!(dt > 0.0)) throw ParameterError("step: dt must be positive");
  Stepper st(spec, *state.grid());
  State s = state;
  st.step(s, dt);
  if (!all_finite(s.u) || !all_finite(s.v))
    throw NumericalError("step: non-finite state");
  return s;
}

SolveOutcome evolve(const ProblemSpec& spec, const State& state0,
                    double horizon, const StepControls& controls) {
  controls.validate();
  const bool finite_horizon = std::isfinite(horizon);
  if (finite_horizon && !(horizon > 0.0))
    throw ParameterError("evolve: horizon must be positive");

  const Grid& grid = *state0.grid();
  Stepper st(spec, grid);
  State s = state0;

  SolveOutcome out;
  out.horizon = horizon;
  out.samples.push_back(make_sample(s));
  out.snapshots.push_back(s);
  int snapshot_every = controls.snapshot_every;
  const double qcap = controls.effective_quiescence_cap();
  const double hard_cap =
      std::max(controls.blow_norm_cap * 1e3, 1e9);

  bool first = true;
  while (out.steps < controls.max_steps) {
    const double L = st.reaction_scale(s);
    double dt = controls.dt_max;
    if (L > 0.0) dt = std::min(dt, controls.theta / L);
    if (first) dt = std::min(dt, controls.dt_init);
    bool floored = false;
    if (dt < controls.dt_min) {
      dt = controls.dt_min;
      floored = true;
      ++out.dt_floor_hits;
    }
    if (finite_horizon) dt = std::min(dt, horizon - s.t);
    st.step(s, dt);
    ++out.steps;
    first = false;

    if (!all_finite(s.u) || !all_finite(s.v))
      throw NumericalError("evolve: state diverged to non-finite values");

    const NormSample ns = make_sample(s);
    out.samples.push_back(ns);
    if (out.samples.size() > controls.max_samples) thin_samples(out.samples);
    out.peak_norm = std::max(out.peak_norm, ns.norm_sum);
    if (out.steps % snapshot_every == 0) {
      out.snapshots.push_back(s);
      if (static_cast<int>(out.snapshots.size()) > controls.max_snapshots) {
        std::vector<State> kept;
        for (std::size_t i = 0; i < out.snapshots.size(); i += 2)
          kept.push_back(out.snapshots[i]);
        out.snapshots.swap(kept);
        snapshot_every *= 2;
      }
    }

    if (ns.norm_sum > controls.blow_norm_cap && (floored || ns.norm_sum > hard_cap)) {
      out.kind = OutcomeKind::BlowUp;
      break;
    }
    if (finite_horizon && s.t >= horizon * (1.0 - 1e-14)) {
      if (ns.norm_sum <= qcap) {
        out.kind = OutcomeKind::Global;
      } else {
        out.kind = OutcomeKind::Undecided;
        out.undecided_reason = "norm above the quiescence cap at the horizon";
      }
      break;
    }
  }
  if (out.steps >= controls.max_steps && out.kind == OutcomeKind::Undecided &&
      out.undecided_reason.empty()) {
    out.undecided_reason = "step budget exhausted";
  }
  out.t_end = s.t;
  if (out.snapshots.empty() || out.snapshots.back().t != s.t)
    out.snapshots.push_back(s);

  if (out.kind == OutcomeKind::BlowUp) {
    const RateFit fit = fit_blowup_rate(out.samples);
    out.fit_ok = fit.ok;
    if (fit.ok) {
      out.t_est = fit.t_est;
      out.fit_slope = fit.slope;
      out.fit_r2 = fit.r2;
    } else {
      out.t_est = s.t;  // flagged: dynamic range too small for a fit
    }
  }
  return out;
}

State evolve_to_time(const ProblemSpec& spec, const State& state0,
                     double t_target, const StepControls& controls) {
  controls.validate();
  if (!(t_target > state0.t))
    throw ParameterError("evolve_to_time: target must exceed current time");
  const Grid& grid = *state0.grid();
  Stepper st(spec, grid);
  State s = state0;
  bool first = true;
  long steps = 0;
  // Lands within a few ulps of the target; a trailing rounding-sized step is
  // skipped so re-running a recorded trajectory reproduces it bit-exactly.
  const double t_slack = 4e-13 * std::max(1.0, std::abs(t_target));
  while (t_target - s.t > t_slack && steps < controls.max_steps) {
    const double L = st.reaction_scale(s);
    double dt = controls.dt_max;
    if (L > 0.0) dt = std::min(dt, controls.theta / L);
    if (first) dt = std::min(dt, controls.dt_init);
    dt = std::max(dt, controls.dt_min);
    // Prefer the natural step when it lands on or before the target.
    if (s.t + dt > t_target) dt = t_target - s.t;
    st.step(s, dt);
    first = false;
    ++steps;
    if (!all_finite(s.u) || !all_finite(s.v))
      throw NumericalError("evolve_to_time: state diverged");
  }
  return s;
}

namespace {

void put_u32(std::ofstream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ofstream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint32_t get_u32(std::ifstream& is) {
  std::uint32_t v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
double get_f64(std::ifstream& is) {
  double v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const State& state, double q,
                      double r) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open checkpoint for writing: " + path);
  const Grid& g = *state.grid();
  os.write("LVB1", 4);
  put_u32(os, static_cast<std::uint32_t>(g.dim));
  for (int ax = 0; ax < g.dim; ++ax) put_u32(os, static_cast<std::uint32_t>(g.n[ax]));
  for (int ax = 0; ax < g.dim; ++ax) {
    put_f64(os, g.lo[ax]);
    put_f64(os, g.hi[ax]);
  }
  put_f64(os, q);
  put_f64(os, r);
  put_f64(os, state.t);
  os.write(reinterpret_cast<const char*>(state.u.v.data()),
           static_cast<std::streamsize>(state.u.v.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(state.v.v.data()),
           static_cast<std::streamsize>(state.v.v.size() * sizeof(double)));
  if (!os) throw DataError("checkpoint write failed: " + path);
}

Checkpoint read_checkpoint(const std::string& path, BoundaryKind bc) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "LVB1", 4) != 0)
    throw DataError("bad checkpoint magic: " + path);
  const int dim = static_cast<int>(get_u32(is));
  if (dim < 1 || dim > 2) throw DataError("bad checkpoint dimension");
  std::array<int, 2> n{1, 1};
  for (int ax = 0; ax < dim; ++ax) n[ax] = static_cast<int>(get_u32(is));
  std::array<double, 2> lo{0, 0}, hi{1, 1};
  for (int ax = 0; ax < dim; ++ax) {
    lo[ax] = get_f64(is);
    hi[ax] = get_f64(is);
  }
  Checkpoint cp;
  cp.q = get_f64(is);
  cp.r = get_f64(is);
  const double t = get_f64(is);
  GridPtr grid = make_grid(dim, n, lo, hi, bc);
  cp.state = State(grid, t);
  is.read(reinterpret_cast<char*>(cp.state.u.v.data()),
          static_cast<std::streamsize>(cp.state.u.v.size() * sizeof(double)));
  is.read(reinterpret_cast<char*>(cp.state.v.v.data()),
          static_cast<std::streamsize>(cp.state.v.v.size() * sizeof(double)));
  if (!is) throw DataError("checkpoint truncated: " + path);
  return cp;
}

}  // namespace lv
