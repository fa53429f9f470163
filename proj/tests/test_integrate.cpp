#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>

#include "lv/analyze.hpp"
#include "lv/errors.hpp"
#include "lv/integrate.hpp"
#include "lv/problem.hpp"

using namespace lv;

namespace {

constexpr double kPi = 3.14159265358979323846;

ProblemSpec constant_spec(double a, double b1, double b2, double c1, double c2,
                          BoundaryKind bc) {
  ProblemSpec spec;
  spec.dim = 1;
  spec.lo = {0.0, 0.0};
  spec.hi = {1.0, 1.0};
  spec.bc = bc;
  spec.a1 = CoefficientField::constant(a);
  spec.a2 = CoefficientField::constant(a);
  spec.b1 = CoefficientField::constant(b1);
  spec.b2 = CoefficientField::constant(b2);
  spec.c1 = CoefficientField::constant(c1);
  spec.c2 = CoefficientField::constant(c2);
  return spec;
}

StepControls basic_controls(double dt_max) {
  StepControls ctl;
  ctl.dt_max = dt_max;
  ctl.dt_init = dt_max;
  ctl.dt_min = 1e-10;
  ctl.blow_norm_cap = 1e6;
  ctl.snapshot_every = 1 << 20;
  return ctl;
}

State homogeneous_state(GridPtr g, double u0, double v0) {
  State s(g, 0.0);
  std::fill(s.u.v.begin(), s.u.v.end(), u0);
  std::fill(s.v.v.begin(), s.v.v.end(), v0);
  return s;
}

}  // namespace

TEST_CASE("zero is an equilibrium of the step") {
  ProblemSpec spec = constant_spec(0.5, 1, 1, 3, 3, BoundaryKind::Dirichlet);
  GridPtr g = spec.grid_for({32, 1});
  State s(g, 0.0);
  State next = step(spec, s, 0.1);
  CHECK(max_norm(next.u) == 0.0);
  CHECK(max_norm(next.v) == 0.0);
  CHECK(next.t == doctest::Approx(0.1));
}

TEST_CASE("pure diffusion step damps the principal mode by 1/(1 + dt l1)") {
  ProblemSpec spec = constant_spec(0, 0, 0, 0, 0, BoundaryKind::Dirichlet);
  GridPtr g = spec.grid_for({64, 1});
  State s(g, 0.0);
  for (int i = 0; i < g->n[0]; ++i) s.u.v[i] = std::sin(kPi * g->coords[0][i]);
  s.v = s.u;
  const double dt = 1e-3;
  const State next = step(spec, s, dt);
  const double h = g->h[0];
  const double l1 = (2.0 / (h * h)) * (1.0 - std::cos(kPi * h));
  for (int i = 0; i < g->n[0]; ++i)
    CHECK(next.u.v[i] == doctest::Approx(s.u.v[i] / (1.0 + dt * l1)).epsilon(1e-11));
}

TEST_CASE("homogeneous run tracks u(t) = 1/(1 - 2t)") {
  ProblemSpec spec = constant_spec(0, 1, 1, 3, 3, BoundaryKind::Neumann);
  GridPtr g = spec.grid_for({8, 1});
  const State s0 = homogeneous_state(g, 1.0, 1.0);
  const State at = evolve_to_time(spec, s0, 0.4, basic_controls(2.5e-5));
  const double exact = 1.0 / (1.0 - 2.0 * 0.4);
  CHECK(std::abs(max_norm(at.u) - exact) / exact < 1e-3);
  CHECK(std::abs(max_norm(at.v) - exact) / exact < 1e-3);
}

TEST_CASE("blow-up classification with T_est from the rate fit") {
  ProblemSpec spec = constant_spec(0, 1, 1, 3, 3, BoundaryKind::Neumann);
  GridPtr g = spec.grid_for({8, 1});
  const State s0 = homogeneous_state(g, 2.0, 2.0);  // T = 1/(2*2) = 0.25
  StepControls ctl = basic_controls(1e-4);
  ctl.dt_min = 1e-9;
  const SolveOutcome out =
      evolve(spec, s0, std::numeric_limits<double>::infinity(), ctl);
  CHECK(out.kind == OutcomeKind::BlowUp);
  REQUIRE(out.fit_ok);
  CHECK(std::abs(out.t_est - 0.25) < 5e-3);
  CHECK(out.fit_slope == doctest::Approx(-1.0).epsilon(0.1));
}

TEST_CASE("small Dirichlet data decays to a Global outcome") {
  ProblemSpec spec = constant_spec(0, 1, 1, 3, 3, BoundaryKind::Dirichlet);
  GridPtr g = spec.grid_for({64, 1});
  State s0(g, 0.0);
  for (int i = 0; i < g->n[0]; ++i)
    s0.u.v[i] = 0.1 * std::sin(kPi * g->coords[0][i]);
  s0.v = s0.u;
  StepControls ctl = basic_controls(5e-4);
  ctl.quiescence_cap = 1.0;
  const SolveOutcome out = evolve(spec, s0, 1.0, ctl);
  CHECK(out.kind == OutcomeKind::Global);
  // Norms decay monotonically after a short transient.
  for (std::size_t k = 10; k + 1 < out.samples.size(); ++k)
    CHECK(out.samples[k + 1].norm_sum <= out.samples[k].norm_sum * (1 + 1e-10));
}

TEST_CASE("zero data stays identically zero and Global") {
  ProblemSpec spec = constant_spec(0, 1, 1, 3, 3, BoundaryKind::Dirichlet);
  GridPtr g = spec.grid_for({16, 1});
  const SolveOutcome out = evolve(spec, State(g, 0.0), 0.5, basic_controls(1e-3));
  CHECK(out.kind == OutcomeKind::Global);
  CHECK(out.peak_norm == 0.0);
}

TEST_CASE("the split update keeps states nonnegative for any dt") {
  ProblemSpec spec = constant_spec(-2.0, 1, 2, 3, 2, BoundaryKind::Dirichlet);
  GridPtr g = spec.grid_for({48, 1});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 5.0);
  State s(g, 0.0);
  for (auto& v : s.u.v) v = unit(rng);
  for (auto& v : s.v.v) v = unit(rng);
  for (double dt : {1e-3, 0.1, 1.0, 10.0}) {
    State next = step(spec, s, dt);
    CHECK(min_value(next.u) >= 0.0);
    CHECK(min_value(next.v) >= 0.0);
    s = next;
  }
}

TEST_CASE("cooperative comparison: ordered data stays ordered") {
  ProblemSpec spec = constant_spec(0, 1, 1, 3, 3, BoundaryKind::Dirichlet);
  GridPtr g = spec.grid_for({48, 1});
  State lo(g, 0.0), hi(g, 0.0);
  for (int i = 0; i < g->n[0]; ++i) {
    const double phi = std::sin(kPi * g->coords[0][i]);
    lo.u.v[i] = phi;
    lo.v.v[i] = 0.8 * phi;
    hi.u.v[i] = 1.2 * phi;
    hi.v.v[i] = phi;
  }
  const StepControls ctl = basic_controls(1e-4);
  for (double t : {0.05, 0.1, 0.15}) {
    const State a = evolve_to_time(spec, lo, t, ctl);
    const State b = evolve_to_time(spec, hi, t, ctl);
    const double slack = 1e-8 * max_norm(b.u);
    for (std::size_t k = 0; k < a.u.v.size(); ++k) {
      CHECK(a.u.v[k] <= b.u.v[k] + slack);
      CHECK(a.v.v[k] <= b.v.v[k] + slack);
    }
  }
}

TEST_CASE("manifold u = K v is preserved by the split update") {
  // b2 = b1 K and c1 = c2 K: the u- and v-updates are conjugate by the K
  // scaling, so the manifold is exact for the scheme.
  const double K = 2.0;
  ProblemSpec spec = constant_spec(0.25, 1.0, K, 3.0 * K, 3.0, BoundaryKind::Neumann);
  GridPtr g = spec.grid_for({8, 1});
  const State s0 = homogeneous_state(g, K, 1.0);
  StepControls ctl = basic_controls(1e-3);
  ctl.dt_min = 1e-9;
  const SolveOutcome out =
      evolve(spec, s0, std::numeric_limits<double>::infinity(), ctl);
  CHECK(out.kind == OutcomeKind::BlowUp);
  for (const auto& ns : out.samples) {
    const double deficit =
        std::abs(ns.norm_u - K * ns.norm_v) / (ns.norm_u + K * ns.norm_v);
    CHECK(deficit < 1e-6);
  }
}

TEST_CASE("first-order convergence against the reaction oracle") {
  ProblemSpec spec = constant_spec(0, 1.0, 2.0, 3.0, 2.5, BoundaryKind::Neumann);
  GridPtr g = spec.grid_for({8, 1});
  const State s0 = homogeneous_state(g, 1.0, 0.6);
  OdeParams p;
  p.b1 = 1.0;
  p.b2 = 2.0;
  p.c1 = 3.0;
  p.c2 = 2.5;
  const OdeValue ref = ode_oracle(p, 1.0, 0.6, 0.2);
  std::vector<double> errs;
  for (double dt : {4e-4, 2e-4, 1e-4}) {
    const State at = evolve_to_time(spec, s0, 0.2, basic_controls(dt));
    errs.push_back(std::abs(max_norm(at.u) - ref.u));
  }
  const double order01 = std::log2(errs[0] / errs[1]);
  const double order12 = std::log2(errs[1] / errs[2]);
  CHECK(order01 == doctest::Approx(1.0).epsilon(0.11));
  CHECK(order12 == doctest::Approx(1.0).epsilon(0.11));
}

TEST_CASE("checkpoints restart bit-exactly") {
  ProblemSpec spec = constant_spec(0, 1, 1, 3, 3, BoundaryKind::Dirichlet);
  GridPtr g = spec.grid_for({32, 1});
  State s0(g, 0.0);
  for (int i = 0; i < g->n[0]; ++i)
    s0.u.v[i] = 2.0 * std::sin(kPi * g->coords[0][i]);
  s0.v = s0.u;
  const StepControls ctl = basic_controls(1e-3);
  const State mid = evolve_to_time(spec, s0, 0.05, ctl);

  const std::string path = "checkpoint_test.lvb";
  write_checkpoint(path, mid, spec.q, spec.r);
  const Checkpoint cp = read_checkpoint(path, spec.bc);
  REQUIRE(cp.state.u.v.size() == mid.u.v.size());
  CHECK(std::memcmp(cp.state.u.v.data(), mid.u.v.data(),
                    mid.u.v.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(cp.state.v.v.data(), mid.v.v.data(),
                    mid.v.v.size() * sizeof(double)) == 0);
  CHECK(cp.state.t == mid.t);
  CHECK(cp.q == spec.q);

  // Continuing from the loaded state reproduces the in-memory continuation.
  const State a = evolve_to_time(spec, mid, 0.1, ctl);
  const State b = evolve_to_time(spec, cp.state, 0.1, ctl);
  CHECK(std::memcmp(a.u.v.data(), b.u.v.data(), a.u.v.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(a.v.v.data(), b.v.v.data(), a.v.v.size() * sizeof(double)) == 0);
  std::remove(path.c_str());
}

TEST_CASE("corrupt checkpoints are rejected") {
  const std::string path = "bad_checkpoint.lvb";
  {
    FILE* f = fopen(path.c_str(), "wb");
    fputs("NOPE", f);
    fclose(f);
  }
  CHECK_THROWS_AS(read_checkpoint(path, BoundaryKind::Dirichlet), DataError);
  std::remove(path.c_str());
}

TEST_CASE("controls and horizon preconditions") {
  ProblemSpec spec = constant_spec(0, 1, 1, 3, 3, BoundaryKind::Dirichlet);
  GridPtr g = spec.grid_for({8, 1});
  StepControls bad;
  bad.dt_min = 1e-3;
  bad.dt_max = 1e-4;
  bad.dt_init = 1e-4;
  CHECK_THROWS_AS(evolve(spec, State(g, 0.0), 1.0, bad), ParameterError);
  CHECK_THROWS_AS(evolve(spec, State(g, 0.0), -1.0, basic_controls(1e-3)),
                  ParameterError);
  CHECK_THROWS_AS(step(spec, State(g, 0.0), 0.0), ParameterError);
}
