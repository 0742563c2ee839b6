#pragma once

#include <string_view>

#include "timelaw/cost.hpp"
#include "timelaw/curve.hpp"

namespace timelaw {

/// Coefficient of (dp/dt)^4 in the resolved fourth-order equation.
///  - paper_printed:          W = V + 4U
///  - expanded_from_f_terms:  W = V, from expanding f1 - df2/dt + d2f3/dt2 = 0 directly
/// The two agree whenever U = 0 (line, circle). Only expanded_from_f_terms makes the
/// integrated trajectories stationary for the cost; it is the default.
enum class RhsVariant { paper_printed, expanded_from_f_terms };

inline constexpr RhsVariant kDefaultVariant = RhsVariant::expanded_from_f_terms;

std::string_view to_string(RhsVariant variant);
/// Accepts "paper"/"paper_printed" and "expanded"/"expanded_from_f_terms".
RhsVariant variant_from_string(std::string_view name);

/// dz/dt of the first-order system z = (p, dp, ddp, dddp).
/// Depends on alpha and mass only through their product.
StateVector rhs(const CurveModel& curve, const StateVector& z, double alpha, double mass, RhsVariant variant);

/// Closed-form optimal law on a straight line:
///   p(t) = A sinh(gamma t) + B cosh(gamma t) + C t + D,  gamma = (alpha m)^(-1/2).
struct LineLaw {
    double p0 = 0.0;
    double p1 = 0.0;
    double gamma = 0.0;
    double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
    double Delta = 0.0;

    /// p and its first three time derivatives at t. Evaluated in the form
    /// kappa (e^{gamma (t-1)} - e^{-gamma t}) + C t + D, which avoids the
    /// cancellation between the sinh and cosh terms for large gamma.
    [[nodiscard]] StateVector at(double t) const;

private:
    double kappa_ = 0.0;
    friend LineLaw line_analytic(double, double, double, double);
};

LineLaw line_analytic(double p0, double p1, double alpha, double mass);

/// The two printed forms of Delta; equal as functions of gamma.
double line_delta_product_form(double gamma);     // sinh g (sinh g - g) - (cosh g - 1)^2
double line_delta_difference_form(double gamma);  // 2 (cosh g - 1) - g sinh g

enum class SpecialCase { line, circle };

/// d(dddp)/dt from the printed special-case equations:
///   line:   ddp / (alpha m)
///   circle: ddp / (alpha m) + 6 dp^2 ddp
double printed_special_rhs(SpecialCase kind, const StateVector& z, double alpha, double mass);

}  // namespace timelaw
