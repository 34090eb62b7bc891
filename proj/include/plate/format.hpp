#pragma once

#include <cstdio>
#include <string>

namespace plate {

/// Full-precision scientific notation used by every text report.
inline std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", v);
    return buf;
}

}  // namespace plate
