#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace walkspec::verify {

inline constexpr std::uint64_t kDefaultSeed = 20240601;

struct CheckInfo {
    std::string id;
    std::string name;
    std::string suite;  // closedform, dp, oracle, mc or asymptotics
};

struct CheckResult {
    std::string id;
    std::string name;
    std::string suite;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = kDefaultSeed;
    unsigned jobs = 1;
};

// Every check in a fixed order: the numbered acceptance criteria, then "sweep".
const std::vector<CheckInfo>& list_checks();

// Runs one check by id. Throws InvalidArgument for unknown ids.
CheckResult run_check(const std::string& id, const VerifyOptions& options = {});

// Checks of one suite ("all" for every suite), run on options.jobs threads and returned in
// list_checks() order.
std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& options = {});

// "[PASS] 1 name: detail"
std::string format_result(const CheckResult& result);

}  // namespace walkspec::verify
