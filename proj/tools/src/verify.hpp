#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace anticonc::cli {

struct CheckResult {
    std::string name;
    std::size_t trials = 0;
    std::size_t failures = 0;
};

/// Randomized invariant checks across all modules; deterministic in the seed.
std::vector<CheckResult> run_invariant_suite(std::uint64_t seed);

}  // namespace anticonc::cli
