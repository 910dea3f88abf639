#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dopkey {

struct SelftestResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Special-function, quadrature and key-agreement invariants. Each entry is one check.
std::vector<SelftestResult> run_selftest();

/// Prints one "PASS name: detail" / "FAIL name: detail" line per result; returns the failure count.
int report_selftest(const std::vector<SelftestResult>& results, std::ostream& out);

} // namespace dopkey
