#pragma once

#include <cstdint>

#include "lv/problem.hpp"

namespace lv {

/// Splitmix-style seed expansion: per-run seeds are derived from the master
/// seed and the run index, independent of scheduling.
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// One seeded ensemble member: the base spec with its six coefficients
/// replaced by random low-order Fourier fields (emitted through the config
/// expression grammar, so they are analytic and grid-independent), plus an
/// initial-data amplitude.
struct EnsembleMember {
  ProblemSpec spec;
  double alpha = 1.0;
  std::uint64_t seed = 0;
};

/// The b, c fields take values in [eps0, b_cap] and [c_lo, m0] with
/// c_lo^2 >= b_cap^2 + eps0, so c1 c2 >= b1 b2 + eps0 holds pointwise by
/// construction; |a1|, |a2| <= m0. The spec's modulus constant is raised to
/// cover the generated slopes, so every member passes validate_problem.
EnsembleMember make_ensemble_member(const ProblemSpec& base,
                                    std::uint64_t master_seed, int index,
                                    double alpha_min = 2.0,
                                    double alpha_max = 30.0);

}  // namespace lv
