#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lv/coefficients.hpp"
#include "lv/grid.hpp"
#include "lv/state.hpp"

namespace lv {

/// Admissible-class parameters: the b,c coefficients must take values in
/// [eps0, m0] with c1*c2 >= b1*b2 + eps0 pointwise, |a1|,|a2| <= m0, and all
/// six fields must obey the modulus of continuity w0(s) = lipschitz * s
/// (checked empirically over grid-neighbor increments).
struct ClassParams {
  double eps0 = 0.5;
  double m0 = 4.0;
  double lipschitz = 50.0;
};

/// Full description of one problem: box domain, boundary handling, reaction
/// exponents, the six coefficient fields, and (optionally) the period of
/// time-periodic coefficients.
struct ProblemSpec {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  BoundaryKind bc = BoundaryKind::Dirichlet;
  double q = 1.0;
  double r = 1.0;
  CoefficientField a1, a2, b1, b2, c1, c2;
  std::optional<double> period;
  ClassParams class_params;

  bool coefficients_depend_on_t() const;
  /// True when every coefficient is a plain constant.
  bool constant_coefficients() const;
  GridPtr grid_for(std::array<int, 2> n) const;
};

struct Violation {
  std::string constraint;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  std::string summary() const;
};

/// Checks exponent preconditions, the coefficient box bounds, the coupling
/// margin c1*c2 >= b1*b2 + eps0 pointwise, and the empirical modulus of
/// continuity. Time-periodic coefficients are sampled over one period.
ValidationReport validate_problem(const ProblemSpec& spec, const Grid& grid);

/// True iff n <= 2 or q + r < n(n+2)/(n-1)^2.
bool check_dimension_condition(int n, double q, double r);

/// K = ((c1 + b2) / (c2 + b1))^(1/q).
double proportionality_constant(double b1, double b2, double c1, double c2,
                                double q);

/// c = c1 / K - b1; positive whenever c1*c2 > b1*b2.
double reduced_constant(double b1, double c1, double K);

/// Parabolic rescaling parameters. The amplitude exponent is 2/(q+r-1).
struct ScalingParams {
  double lambda = 1.0;
  std::array<double, 2> x0{0.0, 0.0};
  double t0 = 0.0;

  static double amplitude_exponent(double q, double r) {
    return 2.0 / (q + r - 1.0);
  }
};

struct RescaleResult {
  State state;
  /// Sample coordinates that fell outside the box and were clamped.
  std::size_t clipped = 0;
};

/// u~(y) = lambda^(2/(q+r-1)) u(x0 + lambda y), same for v; the new time is
/// (t - t0) / lambda^2. Out-of-box sample points are clamped to the box and
/// counted.
RescaleResult rescale_state(const State& state, const ScalingParams& p,
                            const ProblemSpec& spec);

}  // namespace lv
