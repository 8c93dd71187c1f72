#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tikflow {

struct AcceptanceOptions {
    bool quick = false;       // skip the nonsmooth run
    double tol_scale = 1.0;   // scales distance/band tolerances (testing hook)
    int only_criterion = 0;   // 0 = all
};

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
};

/// Runs the acceptance criteria and prints one PASS/FAIL line per criterion
/// to `progress` (when non-null). Desk scale: every criterion finishes in
/// seconds.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            std::ostream* progress);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace tikflow
