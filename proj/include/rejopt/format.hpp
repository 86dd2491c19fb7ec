#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace rejopt {

/// Shortest round-trip decimal form of a double; locale-independent,
/// byte-stable across runs. Non-finite values print as inf/-inf/nan.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), p);
}

/// Fixed-precision form for aligned text tables.
inline std::string format_fixed(double v, int digits) {
    if (std::isnan(v)) return "nan";
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::fixed, digits);
    (void)ec;
    return std::string(buf.data(), p);
}

}  // namespace rejopt
