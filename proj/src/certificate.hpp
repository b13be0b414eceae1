#pragma once

#include <string>
#include <vector>

namespace sg {

// Outcome of one numerically verified condition. `margin` is the worst
// observed slack; nonnegative (within the check's stated tolerance) passes.
struct CertificateReport {
  std::string name;
  bool passed = false;
  bool warning_only = false;  // advisory: does not fail a run unless --strict
  double margin = 0.0;
  std::string detail;
};

using CertificateList = std::vector<CertificateReport>;

}  // namespace sg
