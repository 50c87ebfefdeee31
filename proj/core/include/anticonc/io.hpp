#pragma once

#include "anticonc/errors.hpp"
#include "anticonc/idiv.hpp"
#include "anticonc/measure.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace anticonc {

/// Malformed JSON input. what() names the line/column or the JSON-pointer
/// path of the offending field.
class ParseError : public InvalidInputError {
public:
    ParseError(const std::string& where, const std::string& message)
        : InvalidInputError(where + ": " + message), where_(where) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

// Measure schema:      {"dim": d, "atoms": [{"x": [reals...], "p": real}, ...]}
// Coefficient schema:  {"dim": d, "a": [[reals...], ...]}
// Compound Poisson:    the measure schema plus {"alpha": real}
// Weights:             [reals...]  (aligned with the atoms of G after canonical ordering)
//
// Readers reject NaN/Inf, nonpositive masses and dimension mismatches.

/// The measure kind is inferred: probability when the total is within 1e-12
/// of 1, sub-probability below that, unnormalized above.
FiniteDiscreteMeasure parse_measure(std::string_view json_text);
CoefficientVector parse_coefficients(std::string_view json_text);
CompoundPoissonModel parse_compound_poisson(std::string_view json_text);
std::vector<double> parse_weights(std::string_view json_text);

std::string to_json(const FiniteDiscreteMeasure& measure);
std::string to_json(const CoefficientVector& a);
std::string to_json(const CompoundPoissonModel& model);

/// Whole-file read; throws ParseError naming the path when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace anticonc
