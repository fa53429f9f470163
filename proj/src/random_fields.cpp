#include "lv/random_fields.hpp"

#include <cmath>
#include <random>

#include "lv/report.hpp"

namespace lv {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0xA0761D6478BD642Full * (index + 1));
  return splitmix64(s);
}

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kModes = 3;

struct FourierSpec {
  double mid = 0.0;
  double amp = 0.0;
  double a[kModes];  // normalized cosine amplitudes, sum |a_k| = 1
  double phase[kModes];
  double lip = 0.0;  // analytic slope bound
};

FourierSpec draw_field(std::mt19937_64& rng, double vmin, double vmax,
                       double length) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FourierSpec f;
  const double span = vmax - vmin;
  f.mid = vmin + span * (0.3 + 0.4 * unit(rng));
  const double room = std::min(f.mid - vmin, vmax - f.mid);
  f.amp = room * (0.2 + 0.7 * unit(rng));
  double raw[kModes], total = 0.0;
  for (int k = 0; k < kModes; ++k) {
    raw[k] = unit(rng);
    total += raw[k];
    f.phase[k] = 2.0 * kPi * unit(rng);
  }
  f.lip = 0.0;
  for (int k = 0; k < kModes; ++k) {
    f.a[k] = raw[k] / total;
    f.lip += f.amp * f.a[k] * (k + 1) * kPi / length;
  }
  return f;
}

// Emits the field through the config grammar so it stays analytic and
// serializable: mid + amp * sum_k a_k cos(w_k x + p_k).
CoefficientField to_expression(const FourierSpec& f, double lo, double length) {
  std::string src = fmt17(f.mid);
  for (int k = 0; k < kModes; ++k) {
    const double w = (k + 1) * kPi / length;
    const double coef = f.amp * f.a[k];
    if (coef == 0.0) continue;
    const double shift = f.phase[k] - w * lo;
    src += " + " + fmt17(coef) + "*cos(" + fmt17(w) + "*x + " + fmt17(shift) + ")";
  }
  return CoefficientField::expression(src);
}

}  // namespace

EnsembleMember make_ensemble_member(const ProblemSpec& base,
                                    std::uint64_t master_seed, int index,
                                    double alpha_min, double alpha_max) {
  EnsembleMember member;
  member.spec = base;
  member.seed = derive_seed(master_seed, static_cast<std::uint64_t>(index));
  std::mt19937_64 rng(member.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const ClassParams& cp = base.class_params;
  const double length = base.hi[0] - base.lo[0];
  // b in [eps0, b_cap], c in [c_lo, m0] with c_lo^2 = b_cap^2 + eps0: the
  // coupling margin holds pointwise for any field values in those bands.
  double b_cap = cp.eps0 + 0.25 * (cp.m0 - cp.eps0);
  double c_lo = std::sqrt(b_cap * b_cap + cp.eps0);
  while (c_lo > 0.9 * cp.m0 && b_cap > cp.eps0 * 1.01) {
    b_cap = cp.eps0 + 0.5 * (b_cap - cp.eps0);
    c_lo = std::sqrt(b_cap * b_cap + cp.eps0);
  }

  double lip = 0.0;
  auto draw = [&](double vmin, double vmax) {
    FourierSpec f = draw_field(rng, vmin, vmax, length);
    lip = std::max(lip, f.lip);
    return to_expression(f, base.lo[0], length);
  };
  member.spec.a1 = draw(-0.5 * cp.m0, 0.5 * cp.m0);
  member.spec.a2 = draw(-0.5 * cp.m0, 0.5 * cp.m0);
  member.spec.b1 = draw(cp.eps0, b_cap);
  member.spec.b2 = draw(cp.eps0, b_cap);
  member.spec.c1 = draw(c_lo, cp.m0);
  member.spec.c2 = draw(c_lo, cp.m0);
  member.spec.class_params.lipschitz =
      std::max(cp.lipschitz, lip * 1.05 + 1e-9);

  member.alpha = alpha_min * std::pow(alpha_max / alpha_min, unit(rng));
  return member;
}

}  // namespace lv
