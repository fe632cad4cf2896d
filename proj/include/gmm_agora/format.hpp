#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace gmm_agora {

// Shortest text that parses back to exactly v ("inf", "-inf", "nan" otherwise).
inline std::string shortest(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, result.ptr);
}

}  // namespace gmm_agora
