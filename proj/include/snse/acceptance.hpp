#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "snse/expr.hpp"

namespace snse {

struct CriterionResult {
    std::string name;
    bool pass = false;
    std::string details;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    long long n_real = 10000;    // realizations for the Monte Carlo criteria
    uint64_t seed = 987654321;
    int threads = 0;
    bool quick = false;          // reduced sizes for development runs
};

// Runs every acceptance criterion, streaming one pass/fail line per
// criterion to `live` when given.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            std::ostream* live = nullptr);

bool all_passed(const std::vector<CriterionResult>& rs);

// Independent flat matching enumerator used as the combinatorial oracle for
// the deformation; lives here so the verify command can run it too.
namespace oracle {
// factors given as (plain degree, conjugated degree), flattened with
// conjugated legs first inside each factor
sym::Expr wick_enumerate(const std::vector<std::pair<int, int>>& factors);
} // namespace oracle

} // namespace snse
