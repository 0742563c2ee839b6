#pragma once

#include <array>
#include <functional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace timelaw {

enum class CurveKind { line, circle, parabola, ellipse, polynomial };

std::string_view to_string(CurveKind kind);
CurveKind curve_kind_from_string(std::string_view name);

/// x = p, y = k p + b
struct LineParams {
    double k = 0.0;
    double b = 0.0;
};

/// x = R cos p, y = R sin p
struct CircleParams {
    double R = 1.0;
};

/// x = p, y = k p^2 + b
struct ParabolaParams {
    double k = 0.0;
    double b = 0.0;
};

/// x = a cos p, y = b sin p
struct EllipseParams {
    double a = 1.0;
    double b = 1.0;
};

/// Coefficients listed lowest degree first.
struct PolynomialParams {
    std::vector<double> x;
    std::vector<double> y;
};

using CurveSpec = std::variant<LineParams, CircleParams, ParabolaParams, EllipseParams, PolynomialParams>;

CurveKind kind_of(const CurveSpec& spec);

/// Values and parameter derivatives x, x', x'', x''', x'''' (index = order).
struct DerivativeTable {
    std::array<double, 5> x{};
    std::array<double, 5> y{};
};

/// Derivative products through which the reduced dynamics see the curve.
///   G = x'^2 + y'^2        S = x'x'' + y'y''      Q = x''^2 + y''^2
///   T = x'x''' + y'y'''    U = x''x''' + y''y'''  V = x'x'''' + y'y''''
/// They satisfy dG/dp = 2S, dS/dp = Q + T, dQ/dp = 2U, dT/dp = U + V.
struct GeometricCoefficients {
    double G = 0.0;
    double S = 0.0;
    double Q = 0.0;
    double T = 0.0;
    double U = 0.0;
    double V = 0.0;
};

/// Below this, x'^2 + y'^2 is treated as a singular parameterization.
inline constexpr double kRegularityThreshold = 1e-12;

/// Immutable planar parametric curve, evaluable on the whole real line.
class CurveModel {
public:
    /// Throws ValidationError for degenerate or non-finite parameters.
    explicit CurveModel(CurveSpec spec);

    [[nodiscard]] CurveKind kind() const noexcept { return kind_of(spec_); }
    [[nodiscard]] const CurveSpec& spec() const noexcept { return spec_; }

    /// Throws ValidationError when p is not finite.
    [[nodiscard]] DerivativeTable derivatives(double p) const;
    [[nodiscard]] GeometricCoefficients coefficients(double p) const;
    /// Same as coefficients() but throws SingularParameterization when G < threshold.
    [[nodiscard]] GeometricCoefficients regular_coefficients(double p) const;

private:
    CurveSpec spec_;
};

CurveModel make_curve(CurveSpec spec);
DerivativeTable eval_derivatives(const CurveModel& curve, double p);
GeometricCoefficients geometric_coefficients(const CurveModel& curve, double p);
GeometricCoefficients geometric_coefficients(const DerivativeTable& table);

struct ValidationReport {
    double tolerance = 0.0;
    /// Index k holds the check of derivative order k+1.
    std::array<double, 4> max_deviation{};
    std::array<bool, 4> passed{};

    [[nodiscard]] bool all_passed() const noexcept;
};

using DerivativeSource = std::function<DerivativeTable(double)>;

/// Compares each analytic derivative of order 1..4 with the central difference of the
/// order below it. Deviations are |analytic - fd| / max(1, |analytic|).
ValidationReport validate_derivatives(const DerivativeSource& source, std::span<const double> p_grid,
                                      double h, double tolerance = 1e-5);
ValidationReport validate_derivatives(const CurveModel& curve, std::span<const double> p_grid, double h,
                                      double tolerance = 1e-5);

}  // namespace timelaw
