#pragma once

#include <cstdio>
#include <string>

namespace evp {

// %g formatting at a fixed number of significant digits; keeps CSV and
// scenario dumps byte-stable across runs.
inline std::string num_g(double value, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
    return buf;
}

inline std::string num9(double value) { return num_g(value, 9); }
inline std::string num17(double value) { return num_g(value, 17); }

}  // namespace evp
