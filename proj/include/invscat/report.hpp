#pragma once
#include <string>
#include <vector>

namespace invscat {

// One row of a diagnostic table: value measured against a threshold.
struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = true;
  std::string note;
};

inline bool all_pass(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace invscat
