#pragma once
#include <charconv>
#include <string>

namespace lmul {

// Shortest decimal string that parses back to the same double. Used for every
// number that lands in an output file, so artifacts are byte-reproducible.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace lmul
