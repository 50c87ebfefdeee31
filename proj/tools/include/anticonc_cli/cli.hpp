#pragma once

#include "anticonc/quadrature.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace anticonc::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitVerifyFailed = 1,
    kExitInputError = 2,
    kExitUnconverged = 3,
};

/// Fully resolved command-line configuration. Every report echoes it.
struct RunConfig {
    std::string command;  ///< concentration | esseen | bound | structure | verify | scan
    std::string action;   ///< bound/structure sub-action, scan target

    std::optional<std::string> coeffs;
    std::optional<std::string> x;  ///< rademacher | gaussian:k | path
    std::optional<std::string> g;
    std::optional<std::string> v_weights;
    std::optional<std::string> measure;
    std::vector<std::string> factors;

    std::optional<double> tau;
    std::optional<double> eps;
    std::optional<double> delta;
    std::optional<double> lambda;
    std::optional<double> alpha;
    std::vector<double> delta_grid;

    std::size_t rmax = 3;
    std::string method;  ///< empty selects the per-command default
    std::uint64_t seed = 0;
    std::size_t samples = 100000;

    std::string sweep;  ///< scan: eps | tau
    std::vector<double> grid;

    std::string format = "json";
    std::optional<std::string> out;
    QuadratureSpec quadrature;
};

/// Parses argv into a config. Throws anticonc::InvalidInputError on bad usage.
/// Returns nullopt after printing help/version to `out`.
std::optional<RunConfig> parse_arguments(int argc, const char* const* argv, std::ostream& out);

/// Executes one command, writing the report to `out` (or config.out) and
/// diagnostics to `err`. Returns an ExitCode.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_arguments + run with exit-code mapping for usage errors.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace anticonc::cli
