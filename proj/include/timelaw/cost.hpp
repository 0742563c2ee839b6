#pragma once

#include <span>
#include <vector>

#include "timelaw/curve.hpp"

namespace timelaw {

/// (p, dp/dt, d2p/dt2, d3p/dt3) at one instant of normalized time.
struct StateVector {
    double p = 0.0;
    double dp = 0.0;
    double ddp = 0.0;
    double dddp = 0.0;

    friend StateVector operator+(const StateVector& l, const StateVector& r) {
        return {l.p + r.p, l.dp + r.dp, l.ddp + r.ddp, l.dddp + r.dddp};
    }
    friend StateVector operator*(double s, const StateVector& z) { return {s * z.p, s * z.dp, s * z.ddp, s * z.dddp}; }
    friend bool operator==(const StateVector&, const StateVector&) = default;
};

/// p sampled at t_i = i / n, i = 0..n, on normalized time [0, 1].
class TimeLaw {
public:
    /// Requires n >= 4, n even, all values finite.
    explicit TimeLaw(std::vector<double> p_values);

    [[nodiscard]] int n() const noexcept { return static_cast<int>(values_.size()) - 1; }
    [[nodiscard]] double step() const noexcept { return 1.0 / n(); }
    [[nodiscard]] double t(int i) const noexcept { return static_cast<double>(i) / n(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

private:
    std::vector<double> values_;
};

/// Time derivatives of the tool coordinates.
struct Kinematics {
    double vx = 0.0, vy = 0.0;
    double ax = 0.0, ay = 0.0;
    double jx = 0.0, jy = 0.0;
    double sx = 0.0, sy = 0.0;  // fourth derivative; uses the supplied d(dddp)/dt
};

struct FTerms {
    double f1 = 0.0;
    double f2 = 0.0;
    double f3 = 0.0;
};

struct CostBreakdown {
    double kinetic = 0.0;          // (m/2) int |dr/dt|^2 dt
    double inertia_measure = 0.0;  // int |d2r/dt2|^2 dt
    double total = 0.0;            // kinetic + (alpha m^2 / 2) inertia_measure
};

Kinematics chain_kinematics(const DerivativeTable& table, const StateVector& z, double dddp_rate = 0.0);

/// Composite Simpson weights for n cells (n even) of width h.
std::vector<double> simpson_weights(int n, double h);
double simpson(std::span<const double> samples, double h);

/// First and second time derivatives of a sampled law: second-order central
/// differences inside, second-order one-sided at the two ends.
struct LawDerivatives {
    std::vector<double> rate;
    std::vector<double> accel;
};
LawDerivatives differentiate_law(std::span<const double> p, double h);

/// Cost of a sampled law; derivatives of p by finite differences.
CostBreakdown evaluate_cost(const CurveModel& curve, const TimeLaw& law, double alpha, double mass);
/// Cost of a trajectory whose states carry exact p-derivatives (n + 1 samples, n even).
CostBreakdown evaluate_cost(const CurveModel& curve, std::span<const StateVector> states, double alpha,
                            double mass);

FTerms f_terms(const CurveModel& curve, const StateVector& z, double alpha, double mass);

/// Stationarity residual r = f1 - df2/dt + d2f3/dt2 at the interior nodes 2..n-2
/// (n - 3 values), time derivatives by fourth-order central differences.
std::vector<double> el_residual(const CurveModel& curve, std::span<const StateVector> states, double alpha,
                                double mass);
double rms(std::span<const double> values);

// Discretized functional used by the direct-transcription oracle, trapezoid
// quadrature over centered differences.
//
// Samples p_0..p_n with p_0, p_n fixed. Rest-to-rest is imposed through even
// ghost reflection p_{-1} = p_1, p_{n+1} = p_{n-1}, so the centered velocity is
// zero at both ends, and through p_1 = (3 p_0 + p_2) / 4 (likewise at the far
// end), the node at which the one-sided second-order velocity vanishes. The free
// variables are p_2..p_{n-2}.

/// Overwrites p[1] and p[n-1] with the values implied by their neighbours.
void apply_rest_convention(std::span<double> p);

struct DiscreteObjective {
    double value = 0.0;
    CostBreakdown parts;
    std::vector<double> gradient;  // d value / d p_j for j = 2..n-2
};

/// p holds n + 1 samples (n >= 4, even). Entries 1 and n-1 are ignored and
/// re-derived from the rest convention.
DiscreteObjective discrete_objective(const CurveModel& curve, std::span<const double> p, double alpha,
                                     double mass, bool with_gradient = true);

std::vector<double> discrete_gradient(const CurveModel& curve, const TimeLaw& law, double alpha, double mass);

}  // namespace timelaw
