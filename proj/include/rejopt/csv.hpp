#pragma once

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rejopt {

/// Malformed input file; the message carries file name and line number.
class ParseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double parse_double(std::string_view field, const std::string& where) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last || !std::isfinite(v))
        throw ParseError(where + ": expected a finite number, got \"" + std::string(field) + "\"");
    return v;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace detail
}  // namespace rejopt
