// Acceptance gate: one pass/fail line per criterion at its pinned tolerance.
//
//   acceptance            runs every criterion
//   acceptance A4 A9 ...  runs a subset
//
// Seed is fixed (override with MAGSQ_SEED); exit code is the number of
// failed criteria.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "magsq/verify.hpp"

int main(int argc, char** argv) {
    magsq::verify::Options options;
    if (const char* env_seed = std::getenv("MAGSQ_SEED")) options.seed = std::strtoull(env_seed, nullptr, 10);
    if (const char* env_threads = std::getenv("MAGSQ_THREADS"))
        options.threads = std::atoi(env_threads);

    std::vector<magsq::verify::CheckResult> results;
    if (argc > 1) {
        std::vector<std::string> ids(argv + 1, argv + argc);
        results = magsq::verify::run_selected(ids, options);
    } else {
        results = magsq::verify::run_suite("all", options);
    }

    int failed = 0;
    for (const auto& r : results) {
        const bool pass = r.status == magsq::verify::CheckResult::Status::Pass;
        if (!pass) ++failed;
        std::cout << (pass ? "PASS " : "FAIL ") << r.id << " " << r.name << ": " << r.detail
                  << " [" << r.seconds << "s]\n";
    }
    std::cout << (failed == 0 ? "ACCEPTANCE: all criteria passed"
                              : "ACCEPTANCE: " + std::to_string(failed) + " criterion(s) failed")
              << std::endl;
    return failed;
}
