#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "timelaw/curve.hpp"

namespace support {

inline constexpr double pi = std::numbers::pi;

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline std::vector<double> grid(double lo, double hi, int count) {
    std::vector<double> g(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    return g;
}

struct Family {
    const char* name;
    timelaw::CurveSpec spec;
    double p0;
    double p1;
};

inline std::vector<Family> families() {
    using namespace timelaw;
    return {{"line", LineParams{-2.0, 1.0}, 0.0, 1.0},
            {"circle", CircleParams{1.0}, 0.0, pi},
            {"parabola", ParabolaParams{1.0, 0.0}, 0.0, 1.0},
            {"ellipse", EllipseParams{1.0, 2.0}, 0.0, 2.0 * pi}};
}

}  // namespace support
