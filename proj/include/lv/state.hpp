#pragma once

#include "lv/grid.hpp"

namespace lv {

/// The pair of nonnegative grid fields plus current time.
struct State {
  Field u;
  Field v;
  double t = 0.0;

  State() = default;
  State(Field u_, Field v_, double t_) : u(std::move(u_)), v(std::move(v_)), t(t_) {}
  explicit State(GridPtr g, double t_ = 0.0) : u(g), v(g), t(t_) {}

  const GridPtr& grid() const { return u.grid; }
  double sum_max_norm() const;
};

}  // namespace lv
