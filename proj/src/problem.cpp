#include "lv/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lv/errors.hpp"

namespace lv {

double State::sum_max_norm() const {
  double m = 0.0;
  for (std::size_t k = 0; k < u.v.size(); ++k)
    m = std::max(m, std::abs(u.v[k] + v.v[k]));
  return m;
}

bool ProblemSpec::coefficients_depend_on_t() const {
  return a1.depends_on_t() || a2.depends_on_t() || b1.depends_on_t() ||
         b2.depends_on_t() || c1.depends_on_t() || c2.depends_on_t();
}

bool ProblemSpec::constant_coefficients() const {
  auto is_const = [](const CoefficientField& f) {
    return f.kind == CoefficientField::Kind::Constant;
  };
  return is_const(a1) && is_const(a2) && is_const(b1) && is_const(b2) &&
         is_const(c1) && is_const(c2);
}

GridPtr ProblemSpec::grid_for(std::array<int, 2> n) const {
  return make_grid(dim, n, lo, hi, bc);
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& v : violations) os << v.constraint << ": " << v.detail << "\n";
  return os.str();
}

namespace {

struct SampledCoef {
  const char* name;
  std::vector<std::vector<double>> slices;  // per time sample
};

std::string locate(const Grid& g, std::size_t k) {
  std::ostringstream os;
  if (g.dim == 1) {
    os << "x=" << g.coords[0][k];
  } else {
    const int i = static_cast<int>(k) / g.row_len();
    const int j = static_cast<int>(k) % g.row_len();
    os << "x=" << g.coords[0][i] << ", y=" << g.coords[1][j];
  }
  return os.str();
}

}  // namespace

ValidationReport validate_problem(const ProblemSpec& spec, const Grid& grid) {
  ValidationReport report;
  auto violate = [&](const std::string& c, const std::string& d) {
    report.violations.push_back({c, d});
  };

  if (!(spec.q >= spec.r)) violate("exponents", "q >= r fails");
  if (!(spec.r > 0.0)) violate("exponents", "r > 0 fails");
  if (!(spec.q + spec.r > 1.0)) violate("exponents", "q + r > 1 fails");
  if (spec.dim != grid.dim) violate("grid", "grid dimension mismatch");
  for (int ax = 0; ax < spec.dim; ++ax) {
    if (spec.lo[ax] != grid.lo[ax] || spec.hi[ax] != grid.hi[ax])
      violate("grid", "grid extents do not match the problem box");
  }
  if (spec.period && !(*spec.period > 0.0)) violate("period", "period must be positive");

  // Sample each coefficient over the grid, and over one period in time for
  // time-dependent kinds.
  const double T = spec.period.value_or(0.0);
  const bool timedep = spec.coefficients_depend_on_t();
  const int nt = timedep ? 33 : 1;
  const double dt_s = (timedep && T > 0.0) ? T / (nt - 1) : 0.0;
  std::vector<SampledCoef> coefs;
  coefs.reserve(6);
  const std::pair<const char*, const CoefficientField*> entries[] = {
      {"a1", &spec.a1}, {"a2", &spec.a2}, {"b1", &spec.b1},
      {"b2", &spec.b2}, {"c1", &spec.c1}, {"c2", &spec.c2}};
  for (const auto& [name, f] : entries) {
    SampledCoef s;
    s.name = name;
    s.slices.resize(nt);
    for (int j = 0; j < nt; ++j) {
      f->sample_on(grid, j * dt_s, s.slices[j]);
      for (double v : s.slices[j]) {
        if (!std::isfinite(v)) {
          violate("finite", std::string(name) + " has a non-finite sample");
          break;
        }
      }
    }
    coefs.push_back(std::move(s));
  }
  if (!report.valid()) return report;

  const ClassParams& cp = spec.class_params;
  // Range bounds: |a_i| <= m0; b_i, c_i in [eps0, m0].
  for (int ci = 0; ci < 6; ++ci) {
    const bool is_a = ci < 2;
    double worst = 0.0;
    std::size_t worst_k = 0;
    int worst_j = 0;
    bool bad = false;
    for (int j = 0; j < nt; ++j) {
      const auto& s = coefs[ci].slices[j];
      for (std::size_t k = 0; k < s.size(); ++k) {
        double excess = 0.0;
        if (is_a) {
          excess = std::abs(s[k]) - cp.m0;
        } else {
          excess = std::max(cp.eps0 - s[k], s[k] - cp.m0);
        }
        if (excess > worst) {
          worst = excess;
          worst_k = k;
          worst_j = j;
          bad = true;
        }
      }
    }
    if (bad) {
      std::ostringstream os;
      os << coefs[ci].name << " leaves "
         << (is_a ? "[-m0, m0]" : "[eps0, m0]") << " by " << worst << " at "
         << locate(grid, worst_k) << ", t=" << worst_j * dt_s;
      violate("range", os.str());
    }
  }

  // Coupling margin c1*c2 >= b1*b2 + eps0 pointwise.
  {
    double worst = 0.0;
    std::size_t worst_k = 0;
    int worst_j = 0;
    bool bad = false;
    for (int j = 0; j < nt; ++j) {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double margin = coefs[4].slices[j][k] * coefs[5].slices[j][k] -
                              coefs[2].slices[j][k] * coefs[3].slices[j][k] -
                              cp.eps0;
        if (margin < 0.0 && -margin >= worst) {
          worst = -margin;
          worst_k = k;
          worst_j = j;
          bad = true;
        }
      }
    }
    if (bad) {
      std::ostringstream os;
      os << "c1*c2 >= b1*b2 + eps0 fails by " << worst << " at "
         << locate(grid, worst_k) << ", t=" << worst_j * dt_s;
      violate("coupling", os.str());
    }
  }

  // Empirical modulus of continuity over grid-neighbor and consecutive-time
  // increments: |phi(p) - phi(q)| <= lipschitz * dist(p, q). A necessary, not
  // sufficient, check.
  for (int ci = 0; ci < 6; ++ci) {
    double worst = 0.0;
    std::string where;
    for (int j = 0; j < nt; ++j) {
      const auto& s = coefs[ci].slices[j];
      for (int i = 0; i < grid.n[0]; ++i) {
        for (int jj = 0; jj < grid.row_len(); ++jj) {
          const std::size_t k = grid.index(i, jj);
          if (i + 1 < grid.n[0]) {
            const double inc = std::abs(s[grid.index(i + 1, jj)] - s[k]) -
                               cp.lipschitz * grid.h[0];
            if (inc > worst) {
              worst = inc;
              where = locate(grid, k);
            }
          }
          if (grid.dim == 2 && jj + 1 < grid.n[1]) {
            const double inc = std::abs(s[grid.index(i, jj + 1)] - s[k]) -
                               cp.lipschitz * grid.h[1];
            if (inc > worst) {
              worst = inc;
              where = locate(grid, k);
            }
          }
          if (j + 1 < nt) {
            const double inc =
                std::abs(coefs[ci].slices[j + 1][k] - s[k]) - cp.lipschitz * dt_s;
            if (inc > worst) {
              worst = inc;
              where = locate(grid, k) + " (time increment)";
            }
          }
        }
      }
    }
    if (worst > 0.0) {
      std::ostringstream os;
      os << coefs[ci].name << " violates the modulus bound by " << worst
         << " near " << where;
      violate("modulus", os.str());
    }
  }

  return report;
}

bool check_dimension_condition(int n, double q, double r) {
  if (n < 1) throw ParameterError("dimension must be >= 1");
  if (n <= 2) return true;
  const double bound = static_cast<double>(n) * (n + 2) /
                       (static_cast<double>(n - 1) * (n - 1));
  return q + r < bound;
}

double proportionality_constant(double b1, double b2, double c1, double c2,
                                double q) {
  return std::pow((c1 + b2) / (c2 + b1), 1.0 / q);
}

double reduced_constant(double b1, double c1, double K) {
  return c1 / K - b1;
}

RescaleResult rescale_state(const State& state, const ScalingParams& p,
                            const ProblemSpec& spec) {
  if (!(p.lambda > 0.0)) throw ParameterError("rescale: lambda must be positive");
  const GridPtr& g = state.grid();
  RescaleResult out;
  out.state = State(g, (state.t - p.t0) / (p.lambda * p.lambda));
  const double amp =
      std::pow(p.lambda, ScalingParams::amplitude_exponent(spec.q, spec.r));
  if (p.lambda == 1.0 && p.x0[0] == 0.0 && p.x0[1] == 0.0) {
    out.state.u = state.u;
    out.state.v = state.v;
    return out;
  }
  auto clamp_axis = [&](double x, int ax, bool& clipped) {
    if (x < g->lo[ax]) {
      clipped = true;
      return g->lo[ax];
    }
    if (x > g->hi[ax]) {
      clipped = true;
      return g->hi[ax];
    }
    return x;
  };
  for (int i = 0; i < g->n[0]; ++i) {
    for (int j = 0; j < g->row_len(); ++j) {
      bool clipped = false;
      const double sx = clamp_axis(p.x0[0] + p.lambda * g->coords[0][i], 0, clipped);
      double sy = 0.0;
      if (g->dim == 2)
        sy = clamp_axis(p.x0[1] + p.lambda * g->coords[1][j], 1, clipped);
      const std::size_t k = g->index(i, j);
      out.state.u.v[k] = amp * sample_field(state.u, sx, sy);
      out.state.v.v[k] = amp * sample_field(state.v, sx, sy);
      if (clipped) ++out.clipped;
    }
  }
  return out;
}

}  // namespace lv
