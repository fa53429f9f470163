#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lv::accept {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the numbered verification criteria (all of them when `only` is
/// empty), printing one pass/fail line per criterion to `log`.
std::vector<CriterionResult> run_all(std::ostream& log,
                                     const std::vector<int>& only = {});

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace lv::accept
