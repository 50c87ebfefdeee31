#pragma once

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace anticonc::cli {

using Json = nlohmann::ordered_json;

/// 12 significant digits, '.' decimal, independent of the global locale.
inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

inline Json real_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json optional_real(const std::optional<double>& v) { return v ? real_or_null(*v) : Json(nullptr); }

/// Plain CSV table; cells are preformatted strings.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(std::ostream& os) const {
        auto line = [&os](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
            os << '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
    }
};

inline std::string csv_cell(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace anticonc::cli
