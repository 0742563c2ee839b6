#include "timelaw/reduced_ode.hpp"

#include <cmath>
#include <string>

#if TIMELAW_HAVE_QUADMATH
#include <quadmath.h>
#endif

#include "timelaw/errors.hpp"

namespace timelaw {

std::string_view to_string(RhsVariant variant) {
    return variant == RhsVariant::paper_printed ? "paper_printed" : "expanded_from_f_terms";
}

RhsVariant variant_from_string(std::string_view name) {
    if (name == "paper" || name == "paper_printed") return RhsVariant::paper_printed;
    if (name == "expanded" || name == "expanded_from_f_terms") return RhsVariant::expanded_from_f_terms;
    throw ValidationError("unknown rhs variant '" + std::string(name) + "'");
}

StateVector rhs(const CurveModel& curve, const StateVector& z, double alpha, double mass, RhsVariant variant) {
    if (!(alpha > 0.0) || !(mass > 0.0)) throw ValidationError("alpha and mass must be > 0");
    const double am = alpha * mass;
    const GeometricCoefficients g = curve.regular_coefficients(z.p);
    const double W = variant == RhsVariant::paper_printed ? g.V + 4.0 * g.U : g.V;
    const double z1 = z.dp, z2 = z.ddp, z3 = z.dddp;
    const double z1sq = z1 * z1;
    const double s_over_g = g.S / g.G;
    const double jerk_rate = z2 / am + s_over_g / am * z1sq - s_over_g * (4.0 * z1 * z3 + 3.0 * z2 * z2) -
                             6.0 * (g.T / g.G) * z1sq * z2 - (W / g.G) * z1sq * z1sq;
    return {z1, z2, z3, jerk_rate};
}

namespace {

// Both printed forms cancel badly (large gamma for the product, small gamma
// for the difference), so they are evaluated in extended precision.
#if TIMELAW_HAVE_QUADMATH
using Wide = __float128;
Wide wide_sinh(Wide x) { return sinhq(x); }
Wide wide_cosh(Wide x) { return coshq(x); }
#else
using Wide = long double;
Wide wide_sinh(Wide x) { return std::sinh(x); }
Wide wide_cosh(Wide x) { return std::cosh(x); }
#endif

}  // namespace

double line_delta_product_form(double gamma) {
    const Wide g = gamma;
    const Wide sh = wide_sinh(g);
    const Wide ch_m1 = wide_cosh(g) - 1;
    return static_cast<double>(sh * (sh - g) - ch_m1 * ch_m1);
}

double line_delta_difference_form(double gamma) {
    const Wide g = gamma;
    return static_cast<double>(2 * (wide_cosh(g) - 1) - g * wide_sinh(g));
}

LineLaw line_analytic(double p0, double p1, double alpha, double mass) {
    if (!(alpha > 0.0) || !(mass > 0.0)) throw ValidationError("alpha and mass must be > 0");
    if (!std::isfinite(p0) || !std::isfinite(p1)) throw ValidationError("boundary values must be finite");
    LineLaw law;
    law.p0 = p0;
    law.p1 = p1;
    law.gamma = 1.0 / std::sqrt(alpha * mass);
    const double g = law.gamma;
    const double dp = p1 - p0;
    law.Delta = line_delta_difference_form(g);
    if (law.Delta == 0.0 || !std::isfinite(law.Delta) || !std::isfinite(std::cosh(g))) {
        throw ValidationError("line solution undefined: Delta = " + std::to_string(law.Delta) +
                              " for gamma = " + std::to_string(g));
    }
    const double half = std::sinh(0.5 * g);
    law.A = dp * std::sinh(g) / law.Delta;
    law.B = dp * (-2.0 * half * half) / law.Delta;
    law.C = -law.A * g;
    law.D = p0 - law.B;

    // Delta e^{-g} = (1 - e^{-g})^2 - g (1 - e^{-2g}) / 2, and
    // kappa = (A + B) e^{g} / 2 = dp (1 - e^{-g}) / (2 Delta e^{-g}).
    const double one_minus = -std::expm1(-g);
    const double scaled_delta = one_minus * one_minus + 0.5 * g * std::expm1(-2.0 * g);
    law.kappa_ = dp * one_minus / (2.0 * scaled_delta);
    return law;
}

StateVector LineLaw::at(double t) const {
    const double grow = std::exp(gamma * (t - 1.0));
    const double decay = std::exp(-gamma * t);
    const double g2 = gamma * gamma;
    StateVector z;
    z.p = kappa_ * (grow - decay) + C * t + D;
    z.dp = kappa_ * gamma * (grow + decay) + C;
    z.ddp = kappa_ * g2 * (grow - decay);
    z.dddp = kappa_ * g2 * gamma * (grow + decay);
    return z;
}

double printed_special_rhs(SpecialCase kind, const StateVector& z, double alpha, double mass) {
    if (!(alpha > 0.0) || !(mass > 0.0)) throw ValidationError("alpha and mass must be > 0");
    const double am = alpha * mass;
    if (kind == SpecialCase::line) return z.ddp / am;
    return z.ddp / am + 6.0 * z.dp * z.dp * z.ddp;
}

}  // namespace timelaw
