#pragma once

#include <string>
#include <vector>

namespace hbt {

struct SelfCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant checks across all modules (a few seconds). Failures are
/// reported, never thrown.
std::vector<SelfCheck> run_selftest();

}  // namespace hbt
