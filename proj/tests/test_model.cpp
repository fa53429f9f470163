#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lv/errors.hpp"
#include "lv/problem.hpp"

using namespace lv;

namespace {

ProblemSpec spec_with_constants(double eps0, double b, double c) {
  ProblemSpec spec;
  spec.dim = 1;
  spec.lo = {0.0, 0.0};
  spec.hi = {1.0, 1.0};
  spec.bc = BoundaryKind::Dirichlet;
  spec.a1 = CoefficientField::constant(0.0);
  spec.a2 = CoefficientField::constant(0.0);
  spec.b1 = CoefficientField::constant(b);
  spec.b2 = CoefficientField::constant(b);
  spec.c1 = CoefficientField::constant(c);
  spec.c2 = CoefficientField::constant(c);
  spec.class_params.eps0 = eps0;
  spec.class_params.m0 = 4.0;
  return spec;
}

}  // namespace

TEST_CASE("class validation accepts and rejects the coupling margin") {
  {
    ProblemSpec spec = spec_with_constants(0.5, 1.0, 1.3);
    // c1 c2 = 1.69 >= 1 + 0.5 holds.
    CHECK(validate_problem(spec, *spec.grid_for({32, 1})).valid());
  }
  {
    ProblemSpec spec = spec_with_constants(0.8, 1.0, 1.3);
    const ValidationReport rep = validate_problem(spec, *spec.grid_for({32, 1}));
    REQUIRE(!rep.valid());
    bool found = false;
    for (const auto& v : rep.violations) found |= v.constraint == "coupling";
    CHECK(found);
  }
}

TEST_CASE("exponent preconditions are checked") {
  ProblemSpec spec = spec_with_constants(0.5, 1.0, 1.3);
  spec.q = 0.5;
  spec.r = 1.0;
  const ValidationReport rep = validate_problem(spec, *spec.grid_for({16, 1}));
  REQUIRE(!rep.valid());
  CHECK(rep.violations.front().constraint == "exponents");
}

TEST_CASE("range and modulus violations are located") {
  ProblemSpec spec = spec_with_constants(0.5, 1.0, 3.0);
  spec.b1 = CoefficientField::constant(5.0);  // above m0 = 4
  ValidationReport rep = validate_problem(spec, *spec.grid_for({16, 1}));
  REQUIRE(!rep.valid());
  CHECK(rep.violations.front().constraint == "range");

  ProblemSpec steep = spec_with_constants(0.5, 1.0, 3.0);
  steep.b1 = CoefficientField::expression("1 + 0.9*sin(200*x)");
  steep.class_params.m0 = 4.0;
  steep.class_params.lipschitz = 5.0;  // the field slope is ~180
  rep = validate_problem(steep, *steep.grid_for({64, 1}));
  REQUIRE(!rep.valid());
  bool found = false;
  for (const auto& v : rep.violations) found |= v.constraint == "modulus";
  CHECK(found);
}

TEST_CASE("expression grammar parses and rejects") {
  Expr e = Expr::parse("1 + 0.5*cos(2*x) - t*x^2");
  CHECK(e.eval(0.0, 0.0, 0.0) == doctest::Approx(1.5));
  CHECK(e.eval(2.0, 0.0, 1.0) ==
        doctest::Approx(1.0 + 0.5 * std::cos(4.0) - 4.0));
  CHECK(e.uses_t());
  CHECK(!Expr::parse("x*x").uses_t());
  CHECK_THROWS_AS(Expr::parse("sin("), ConfigError);
  CHECK_THROWS_AS(Expr::parse("foo(x)"), ConfigError);
  CHECK_THROWS_AS(Expr::parse("x^1.5"), ConfigError);
  CHECK_THROWS_AS(Expr::parse("1//2"), ConfigError);
}

TEST_CASE("sampled coefficients interpolate and wrap periodically") {
  // Two slices over period 2: f(t=0) = 1, f(t=1) = 3, linear in between.
  CoefficientField f = CoefficientField::sampled(
      1, {2, 1}, {0.0, 0.0}, {1.0, 1.0}, 2.0, {{1.0, 1.0}, {3.0, 3.0}});
  CHECK(f.eval(0.5, 0.0, 0.0) == doctest::Approx(1.0));
  CHECK(f.eval(0.5, 0.0, 1.0) == doctest::Approx(3.0));
  CHECK(f.eval(0.5, 0.0, 0.5) == doctest::Approx(2.0));
  // Exact periodicity.
  CHECK(f.eval(0.2, 0.0, 0.7) == doctest::Approx(f.eval(0.2, 0.0, 2.7)));
  CHECK(f.depends_on_t());
  CHECK_THROWS_AS(CoefficientField::sampled(1, {2, 1}, {0, 0}, {1, 1}, 0.0,
                                            {{1.0, std::nan("")}}),
                  DataError);
}

TEST_CASE("dimension condition matches the exponent threshold") {
  CHECK(check_dimension_condition(5, 1, 1));   // 2 < 35/16
  CHECK(!check_dimension_condition(6, 1, 1));  // 2 >= 48/25
  CHECK(check_dimension_condition(3, 2, 1));   // 3 < 15/4
  CHECK(!check_dimension_condition(4, 2, 1));  // 3 >= 24/9
  for (int n = 1; n <= 5; ++n) CHECK(check_dimension_condition(n, 1, 1));
  for (int n = 6; n <= 9; ++n) CHECK(!check_dimension_condition(n, 1, 1));
}

TEST_CASE("proportionality constant from the coefficient sums") {
  CHECK(proportionality_constant(1, 1, 3, 1, 1) == doctest::Approx(2.0));
  CHECK(proportionality_constant(1, 1, 3, 3, 1) == doctest::Approx(1.0));
  CHECK(proportionality_constant(1, 2, 6, 3, 2) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("reduced constant and the degenerate coupling boundary") {
  CHECK(reduced_constant(1, 3, 1.0) == doctest::Approx(2.0));
  CHECK(reduced_constant(1, 3, 2.0) == doctest::Approx(0.5));
  // c1 c2 = b1 b2 boundary: K = (2+1)/(0.5+1) = 2, c = 0.
  const double K = proportionality_constant(1, 1, 2, 0.5, 1);
  CHECK(K == doctest::Approx(2.0));
  CHECK(reduced_constant(1, 2, K) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("the q=1 identity c1 - b1 K = c2 K - b2 holds for random tuples") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.05, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double b1 = unit(rng), b2 = unit(rng), c1 = unit(rng), c2 = unit(rng);
    const double K = proportionality_constant(b1, b2, c1, c2, 1.0);
    const double lhs = c1 - b1 * K;
    const double rhs = c2 * K - b2;
    CHECK(std::abs(lhs - rhs) <= 1e-13 * (std::abs(lhs) + std::abs(rhs) + 1.0));
  }
}

TEST_CASE("proportionality constant is invariant under coefficient scaling") {
  std::mt19937_64 rng(78);
  std::uniform_real_distribution<double> unit(0.05, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double b1 = unit(rng), b2 = unit(rng), c1 = unit(rng), c2 = unit(rng);
    const double sigma = unit(rng);
    const double K1 = proportionality_constant(b1, b2, c1, c2, 1.7);
    const double K2 = proportionality_constant(sigma * b1, sigma * b2,
                                               sigma * c1, sigma * c2, 1.7);
    CHECK(K1 == doctest::Approx(K2).epsilon(1e-13));
  }
}

TEST_CASE("rescaling: identity, amplitude factor, and composition") {
  ProblemSpec spec = spec_with_constants(0.5, 1.0, 3.0);
  spec.bc = BoundaryKind::Neumann;
  GridPtr g = make_grid(1, {64, 1}, {0, 0}, {1, 1}, BoundaryKind::Neumann);

  State s(g, 0.25);
  for (int i = 0; i < g->n[0]; ++i) {
    s.u.v[i] = 1.0 + 0.5 * g->coords[0][i];
    s.v.v[i] = 2.0 - 0.25 * g->coords[0][i];
  }

  SUBCASE("lambda = 1 with zero anchor is the identity") {
    ScalingParams p;
    const RescaleResult r = rescale_state(s, p, spec);
    CHECK(max_abs_diff(r.state.u, s.u) == 0.0);
    CHECK(r.state.t == doctest::Approx(0.25));
    CHECK(r.clipped == 0);
  }

  SUBCASE("constant field gains lambda^2 for q = r = 1") {
    State c(g, 0.0);
    std::fill(c.u.v.begin(), c.u.v.end(), 1.0);
    std::fill(c.v.v.begin(), c.v.v.end(), 1.0);
    ScalingParams p;
    p.lambda = 2.0;
    const RescaleResult r = rescale_state(c, p, spec);
    CHECK(max_norm(r.state.u) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(min_value(r.state.u) == doctest::Approx(4.0).epsilon(1e-14));
  }

  SUBCASE("two rescalings compose like their product") {
    ScalingParams p1, p2, p12;
    p1.lambda = 0.5;
    p2.lambda = 0.5;
    p12.lambda = 0.25;
    const State once = rescale_state(s, p12, spec).state;
    const State twiceA = rescale_state(s, p1, spec).state;
    const State twice = rescale_state(twiceA, p2, spec).state;
    CHECK(max_abs_diff(once.u, twice.u) < 1e-12);
    CHECK(max_abs_diff(once.v, twice.v) < 1e-12);
    CHECK(once.t == doctest::Approx(twice.t).epsilon(1e-14));
  }

  SUBCASE("nonpositive lambda is rejected") {
    ScalingParams p;
    p.lambda = 0.0;
    CHECK_THROWS_AS(rescale_state(s, p, spec), ParameterError);
  }
}

TEST_CASE("amplitude exponent is exactly 2/(q+r-1)") {
  CHECK(ScalingParams::amplitude_exponent(1, 1) == doctest::Approx(2.0));
  CHECK(ScalingParams::amplitude_exponent(2, 1) == doctest::Approx(1.0));
}
