#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace magsq::verify {

struct CheckResult {
    enum class Status { Pass, Fail, Skip };
    std::string id;
    std::string name;
    Status status = Status::Skip;
    std::string detail;
    double seconds = 0.0;
};

struct Options {
    /// Checks whose estimated cost exceeds the budget are reported SKIP.
    double budget_seconds = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 20250810;
    int threads = 4;
    /// When set, an extra check recomputes every cached table from scratch.
    std::optional<std::string> cache_path;
};

struct CheckInfo {
    std::string id;
    std::string name;
    std::string suite;  // "identities" or "limits"
    double est_seconds;
};

std::vector<CheckInfo> list_checks();

std::vector<CheckResult> run_suite(const std::string& suite, const Options& options);
std::vector<CheckResult> run_selected(const std::vector<std::string>& ids, const Options& options);

bool all_passed(const std::vector<CheckResult>& results);  // skips do not fail

}  // namespace magsq::verify
