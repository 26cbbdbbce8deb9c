#pragma once

#include <cstdio>
#include <string>

namespace iob {

// Canonical number rendering for machine-readable outputs: scientific
// notation, 9 significant digits, stable across platforms.
inline std::string fmt_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return buf;
}

}  // namespace iob
