#include "timelaw/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "timelaw/errors.hpp"

namespace timelaw {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw ValidationError(std::string("non-finite curve parameter '") + what + "'");
    }
}

// Value and derivatives to order 4 of sum c_j p^j.
std::array<double, 5> polynomial_derivatives(const std::vector<double>& c, double p) {
    std::array<double, 5> out{};
    const int degree = static_cast<int>(c.size()) - 1;
    for (int order = 0; order <= 4; ++order) {
        // Horner on the coefficients of the order-th derivative.
        double acc = 0.0;
        for (int j = degree; j >= order; --j) {
            double falling = 1.0;
            for (int r = 0; r < order; ++r) falling *= static_cast<double>(j - r);
            acc = acc * p + c[static_cast<std::size_t>(j)] * falling;
        }
        out[static_cast<std::size_t>(order)] = acc;
    }
    return out;
}

void validate_spec(const CurveSpec& spec) {
    std::visit(overloaded{
                   [](const LineParams& s) {
                       require_finite(s.k, "k");
                       require_finite(s.b, "b");
                   },
                   [](const CircleParams& s) {
                       require_finite(s.R, "R");
                       if (!(s.R > 0.0)) throw ValidationError("degenerate curve: circle radius must be > 0");
                   },
                   [](const ParabolaParams& s) {
                       require_finite(s.k, "k");
                       require_finite(s.b, "b");
                   },
                   [](const EllipseParams& s) {
                       require_finite(s.a, "a");
                       require_finite(s.b, "b");
                       if (!(s.a > 0.0) || !(s.b > 0.0)) {
                           throw ValidationError("degenerate curve: ellipse semi-axes must be > 0");
                       }
                   },
                   [](const PolynomialParams& s) {
                       if (s.x.empty() || s.y.empty()) {
                           throw ValidationError("degenerate curve: polynomial coefficients must be non-empty");
                       }
                       for (double c : s.x) require_finite(c, "x coefficient");
                       for (double c : s.y) require_finite(c, "y coefficient");
                   },
               },
               spec);
}

}  // namespace

std::string_view to_string(CurveKind kind) {
    switch (kind) {
        case CurveKind::line: return "line";
        case CurveKind::circle: return "circle";
        case CurveKind::parabola: return "parabola";
        case CurveKind::ellipse: return "ellipse";
        case CurveKind::polynomial: return "polynomial";
    }
    return "unknown";
}

CurveKind curve_kind_from_string(std::string_view name) {
    if (name == "line") return CurveKind::line;
    if (name == "circle") return CurveKind::circle;
    if (name == "parabola") return CurveKind::parabola;
    if (name == "ellipse") return CurveKind::ellipse;
    if (name == "polynomial") return CurveKind::polynomial;
    throw ValidationError("unknown curve kind '" + std::string(name) + "'");
}

CurveKind kind_of(const CurveSpec& spec) {
    return std::visit(overloaded{
                          [](const LineParams&) { return CurveKind::line; },
                          [](const CircleParams&) { return CurveKind::circle; },
                          [](const ParabolaParams&) { return CurveKind::parabola; },
                          [](const EllipseParams&) { return CurveKind::ellipse; },
                          [](const PolynomialParams&) { return CurveKind::polynomial; },
                      },
                      spec);
}

CurveModel::CurveModel(CurveSpec spec) : spec_(std::move(spec)) { validate_spec(spec_); }

DerivativeTable CurveModel::derivatives(double p) const {
    if (!std::isfinite(p)) throw ValidationError("curve evaluated at non-finite parameter");
    return std::visit(overloaded{
                          [p](const LineParams& s) {
                              DerivativeTable t;
                              t.x = {p, 1.0, 0.0, 0.0, 0.0};
                              t.y = {s.k * p + s.b, s.k, 0.0, 0.0, 0.0};
                              return t;
                          },
                          [p](const CircleParams& s) {
                              const double c = s.R * std::cos(p);
                              const double sn = s.R * std::sin(p);
                              DerivativeTable t;
                              t.x = {c, -sn, -c, sn, c};
                              t.y = {sn, c, -sn, -c, sn};
                              return t;
                          },
                          [p](const ParabolaParams& s) {
                              DerivativeTable t;
                              t.x = {p, 1.0, 0.0, 0.0, 0.0};
                              t.y = {s.k * p * p + s.b, 2.0 * s.k * p, 2.0 * s.k, 0.0, 0.0};
                              return t;
                          },
                          [p](const EllipseParams& s) {
                              const double c = std::cos(p);
                              const double sn = std::sin(p);
                              DerivativeTable t;
                              t.x = {s.a * c, -s.a * sn, -s.a * c, s.a * sn, s.a * c};
                              t.y = {s.b * sn, s.b * c, -s.b * sn, -s.b * c, s.b * sn};
                              return t;
                          },
                          [p](const PolynomialParams& s) {
                              DerivativeTable t;
                              t.x = polynomial_derivatives(s.x, p);
                              t.y = polynomial_derivatives(s.y, p);
                              return t;
                          },
                      },
                      spec_);
}

GeometricCoefficients CurveModel::coefficients(double p) const { return geometric_coefficients(derivatives(p)); }

GeometricCoefficients CurveModel::regular_coefficients(double p) const {
    GeometricCoefficients g = coefficients(p);
    if (!(g.G >= kRegularityThreshold)) {
        throw SingularParameterization("singular parameterization: x'^2 + y'^2 = " + std::to_string(g.G) +
                                       " at p = " + std::to_string(p));
    }
    return g;
}

CurveModel make_curve(CurveSpec spec) { return CurveModel(std::move(spec)); }

DerivativeTable eval_derivatives(const CurveModel& curve, double p) { return curve.derivatives(p); }

GeometricCoefficients geometric_coefficients(const CurveModel& curve, double p) { return curve.coefficients(p); }

GeometricCoefficients geometric_coefficients(const DerivativeTable& t) {
    const auto& x = t.x;
    const auto& y = t.y;
    GeometricCoefficients g;
    g.G = x[1] * x[1] + y[1] * y[1];
    g.S = x[1] * x[2] + y[1] * y[2];
    g.Q = x[2] * x[2] + y[2] * y[2];
    g.T = x[1] * x[3] + y[1] * y[3];
    g.U = x[2] * x[3] + y[2] * y[3];
    g.V = x[1] * x[4] + y[1] * y[4];
    return g;
}

bool ValidationReport::all_passed() const noexcept {
    for (bool ok : passed) {
        if (!ok) return false;
    }
    return true;
}

ValidationReport validate_derivatives(const DerivativeSource& source, std::span<const double> p_grid, double h,
                                      double tolerance) {
    ValidationReport report;
    report.tolerance = tolerance;
    if (!(h > 0.0) || p_grid.empty()) {
        report.max_deviation.fill(std::numeric_limits<double>::infinity());
        report.passed.fill(false);
        return report;
    }
    for (double p : p_grid) {
        const DerivativeTable mid = source(p);
        const DerivativeTable hi = source(p + h);
        const DerivativeTable lo = source(p - h);
        for (std::size_t order = 1; order <= 4; ++order) {
            for (int axis = 0; axis < 2; ++axis) {
                const auto& m = axis == 0 ? mid.x : mid.y;
                const auto& up = axis == 0 ? hi.x : hi.y;
                const auto& dn = axis == 0 ? lo.x : lo.y;
                const double fd = (up[order - 1] - dn[order - 1]) / (2.0 * h);
                double dev = std::abs(fd - m[order]) / std::max(1.0, std::abs(m[order]));
                if (!std::isfinite(dev)) dev = std::numeric_limits<double>::infinity();
                report.max_deviation[order - 1] = std::max(report.max_deviation[order - 1], dev);
            }
        }
    }
    for (std::size_t k = 0; k < 4; ++k) report.passed[k] = report.max_deviation[k] <= tolerance;
    return report;
}

ValidationReport validate_derivatives(const CurveModel& curve, std::span<const double> p_grid, double h,
                                      double tolerance) {
    return validate_derivatives([&curve](double p) { return curve.derivatives(p); }, p_grid, h, tolerance);
}

}  // namespace timelaw
