#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "lv/integrate.hpp"
#include "lv/problem.hpp"
#include "lv/threshold.hpp"

namespace lv {

/// Command options carried alongside the problem in a config file; CLI flags
/// override these.
struct RunOptions {
  std::array<int, 2> grid_n{128, 128};
  bool grid_set = false;
  double horizon = 1.0;
  StepControls controls;
  ProfileKind profile = ProfileKind::SineProduct;
  double amplitude = 1.0;
  double v_scale = 1.0;
  double threshold_alpha_lo = 0.0;  // 0 = derive a bracket automatically
  double threshold_alpha_hi = 0.0;
  double threshold_tol = 1e-3;
  double lambda = 1.0;
};

struct ParsedConfig {
  ProblemSpec spec;
  RunOptions options;
  std::string raw;  // file bytes, hashed into the manifest
};

/// Parses and validates a problem configuration. Unknown keys and class
/// violations are rejected with a diagnostic listing every problem found.
ParsedConfig parse_config(const std::string& path);
ParsedConfig parse_config_text(const std::string& text,
                               const std::string& origin = "<memory>");

}  // namespace lv
