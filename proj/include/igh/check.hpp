#pragma once

#include <string>
#include <vector>

namespace igh {

/// One row of a residual table: the worst residual seen and the bound it must stay under.
struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;

  bool pass() const { return residual <= tolerance; }
};

using CheckTable = std::vector<Check>;

inline bool all_pass(const CheckTable& t) {
  for (const auto& c : t)
    if (!c.pass()) return false;
  return true;
}

}  // namespace igh
