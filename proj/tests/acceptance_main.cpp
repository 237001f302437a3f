// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. SNSE_ACCEPT_QUICK=1 switches to reduced sizes for development.
#include <cstdlib>
#include <iostream>

#include "snse/acceptance.hpp"

int main() {
    snse::AcceptanceOptions opt;
    const char* quick = std::getenv("SNSE_ACCEPT_QUICK");
    if (quick && std::string(quick) == "1") opt.quick = true;
    const char* n = std::getenv("SNSE_ACCEPT_REALIZATIONS");
    if (n) opt.n_real = std::atoll(n);
    auto results = snse::run_acceptance(opt, &std::cout);
    int failed = 0;
    for (const auto& r : results)
        if (!r.pass) ++failed;
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
              << " (" << results.size() << " total)\n";
    return failed == 0 ? 0 : 1;
}
