#pragma once

#include <iosfwd>

namespace parest {

struct SelftestResult {
  int passed = 0;
  int failed = 0;

  bool ok() const { return failed == 0; }
};

/// Quick invariant checks across every module; one line per check.
SelftestResult run_selftest(std::ostream& out);

}  // namespace parest
