#pragma once

#include <cstdio>
#include <string>

namespace llrcorr {

// 10 significant digits, locale-independent; CSV output is diffed byte-wise
// in reproducibility checks.
inline std::string fmt_g10(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

}  // namespace llrcorr
