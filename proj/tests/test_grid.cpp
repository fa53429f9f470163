#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lv/errors.hpp"
#include "lv/grid.hpp"
#include "lv/linalg.hpp"

using namespace lv;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("laplacian is exact on quadratics in the interior") {
  GridPtr g = make_grid(1, {63, 1}, {0, 0}, {1, 1}, BoundaryKind::Dirichlet);
  Field f = field_from(g, [](double x) { return x * x; });
  Field lap = apply_laplacian(f, g->bc);
  for (int i = 1; i < g->n[0] - 1; ++i)
    CHECK(lap.v[i] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("laplacian of a constant is zero under Neumann") {
  GridPtr g = make_grid(2, {17, 13}, {0, 0}, {1, 2}, BoundaryKind::Neumann);
  Field f(g, 3.25);
  Field lap = apply_laplacian(f, g->bc);
  CHECK(max_norm(lap) == 0.0);
}

TEST_CASE("laplacian of sin(pi x) matches -pi^2 sin within the Taylor bound") {
  const int n = 200;
  GridPtr g = make_grid(1, {n, 1}, {0, 0}, {1, 1}, BoundaryKind::Dirichlet);
  Field f = field_from(g, [](double x) { return std::sin(kPi * x); });
  Field lap = apply_laplacian(f, g->bc);
  const double h = g->h[0];
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    worst = std::max(worst, std::abs(lap.v[i] + kPi * kPi * f.v[i]));
  const double bound = 2.5 * h * h * std::pow(kPi, 4) / 12.0 * 1.01;
  CHECK(worst < bound);
}

TEST_CASE("discrete laplacian is symmetric for Dirichlet data") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int dim = 1; dim <= 2; ++dim) {
    GridPtr g = dim == 1
                    ? make_grid(1, {40, 1}, {0, 0}, {1, 1}, BoundaryKind::Dirichlet)
                    : make_grid(2, {12, 9}, {0, 0}, {1, 1.5}, BoundaryKind::Dirichlet);
    Field f(g), h(g);
    for (auto& v : f.v) v = unit(rng);
    for (auto& v : h.v) v = unit(rng);
    const double a = dot(apply_laplacian(f, g->bc), h);
    const double b = dot(f, apply_laplacian(h, g->bc));
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("discrete maximum principle: lap_h f >= 0 forces f <= 0 inside") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GridPtr g = make_grid(1, {64, 1}, {0, 0}, {1, 1}, BoundaryKind::Dirichlet);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> rhs(g->size());
    for (auto& v : rhs) v = -unit(rng);  // -Lap f = rhs <= 0, so Lap f >= 0
    ShiftedLaplacian op{g.get(), 0.0, 1.0, nullptr};
    std::vector<double> f;
    solve_shifted_laplacian_1d(op, rhs, f);
    for (double v : f) CHECK(v <= 1e-13);
  }
}

TEST_CASE("boundary distance on interval, square, and whole-space emulation") {
  {
    GridPtr g = make_grid(1, {9, 1}, {0, 0}, {1, 1}, BoundaryKind::Dirichlet);
    Field d = boundary_distance(*g);
    CHECK(d.v[2] == doctest::Approx(0.3));  // x = 0.3
  }
  {
    GridPtr g = make_grid(2, {9, 9}, {0, 0}, {1, 1}, BoundaryKind::Dirichlet);
    Field d = boundary_distance(*g);
    CHECK(d.v[g->index(4, 4)] == doctest::Approx(0.5));  // center
  }
  {
    GridPtr g = make_grid(1, {16, 1}, {-4, 0}, {4, 1}, BoundaryKind::None);
    Field d = boundary_distance(*g);
    CHECK(std::isinf(d.v[3]));
  }
}

TEST_CASE("resample keeps constants and is exact on linears (cell-centered)") {
  GridPtr a = make_grid(1, {13, 1}, {0, 0}, {1, 1}, BoundaryKind::Neumann);
  GridPtr b = make_grid(1, {29, 1}, {0, 0}, {1, 1}, BoundaryKind::Neumann);
  {
    Field f(a, 7.5);
    Field r = resample(f, b);
    CHECK(max_norm(r) == doctest::Approx(7.5).epsilon(1e-15));
    CHECK(min_value(r) == doctest::Approx(7.5).epsilon(1e-15));
  }
  {
    Field f = field_from(a, [](double x) { return 2.0 * x - 0.25; });
    Field r = resample(f, b);
    Field exact = field_from(b, [](double x) { return 2.0 * x - 0.25; });
    CHECK(max_abs_diff(r, exact) < 1e-14);
    // And back down to the coarse grid.
    Field back = resample(exact, a);
    CHECK(max_abs_diff(back, f) < 1e-14);
  }
}

TEST_CASE("resample of sin(pi x) meets the interpolation bound") {
  GridPtr a = make_grid(1, {64, 1}, {0, 0}, {1, 1}, BoundaryKind::Dirichlet);
  GridPtr b = make_grid(1, {128, 1}, {0, 0}, {1, 1}, BoundaryKind::Dirichlet);
  Field f = field_from(a, [](double x) { return std::sin(kPi * x); });
  Field r = resample(f, b);
  Field exact = field_from(b, [](double x) { return std::sin(kPi * x); });
  const double h = a->h[0];
  CHECK(max_abs_diff(r, exact) < kPi * kPi / 8.0 * h * h * 1.01);
}

TEST_CASE("resample is exact on bilinear functions in 2D") {
  GridPtr a = make_grid(2, {11, 7}, {0, -1}, {2, 1}, BoundaryKind::Neumann);
  GridPtr b = make_grid(2, {23, 18}, {0, -1}, {2, 1}, BoundaryKind::Neumann);
  auto bilinear = [](double x, double y) { return 1.0 + 0.5 * x - y + 0.25 * x * y; };
  Field f = field_from(a, bilinear);
  Field r = resample(f, b);
  Field exact = field_from(b, bilinear);
  CHECK(max_abs_diff(r, exact) < 1e-13);
}

TEST_CASE("resample rejects mismatched boxes") {
  GridPtr a = make_grid(1, {8, 1}, {0, 0}, {1, 1}, BoundaryKind::Neumann);
  GridPtr b = make_grid(1, {8, 1}, {0, 0}, {2, 1}, BoundaryKind::Neumann);
  Field f(a, 1.0);
  CHECK_THROWS_AS(resample(f, b), DomainError);
}

TEST_CASE("grid construction validates its inputs") {
  CHECK_THROWS_AS(Grid::make(3, {4, 4}, {0, 0}, {1, 1}, BoundaryKind::Dirichlet),
                  ParameterError);
  CHECK_THROWS_AS(Grid::make(1, {1, 1}, {0, 0}, {1, 1}, BoundaryKind::Dirichlet),
                  ParameterError);
  CHECK_THROWS_AS(Grid::make(1, {8, 1}, {1, 0}, {0, 1}, BoundaryKind::Dirichlet),
                  ParameterError);
}
