// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Scales, seeds, and tolerances are fixed here and in selfcheck.hpp.

#include <iostream>
#include <thread>

#include "bwrk/selfcheck.hpp"

int main() {
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 2;
    const auto results = bwrk::run_acceptance(jobs, /*quick=*/false, &std::cout);
    int failures = 0;
    for (const auto& r : results)
        if (!r.pass) ++failures;
    if (failures == 0) {
        std::cout << "acceptance: all " << results.size() << " criteria passed\n";
        return 0;
    }
    std::cout << "acceptance: " << failures << " of " << results.size() << " criteria FAILED\n";
    return 1;
}
