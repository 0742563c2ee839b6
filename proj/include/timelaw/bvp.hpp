#pragma once

#include <functional>
#include <string>
#include <vector>

#include "timelaw/cost.hpp"
#include "timelaw/curve.hpp"
#include "timelaw/reduced_ode.hpp"

namespace timelaw {

struct SolverConfig {
    double alpha = 0.01;
    double mass = 1.0;
    double p0 = 0.0;
    double p1 = 1.0;
    int n = 1000;  // grid cells, even, >= 100
    double newton_tol = 1e-10;
    int max_newton_iters = 50;
    RhsVariant variant = kDefaultVariant;
    /// Shooting segments; 0 picks a count from the stiffness of the seed law.
    int segments = 0;
};

/// Throws ValidationError when a field is out of range.
void validate(const SolverConfig& config);

/// States on t_i = i / n.
struct Trajectory {
    std::vector<StateVector> states;

    [[nodiscard]] int n() const noexcept { return static_cast<int>(states.size()) - 1; }
    [[nodiscard]] double t(int i) const noexcept { return static_cast<double>(i) / n(); }
    [[nodiscard]] TimeLaw law() const;
};

enum class SolvePath { shooting, oracle_reseeded };

struct SolutionReport {
    Trajectory trajectory;
    CostBreakdown cost;
    /// Largest scaled defect left by the shooting iteration: end conditions
    /// |p(1) - p1|, tau |dp(1)|, and the continuity gaps between segments.
    double bc_residual = 0.0;
    double el_residual_rms = 0.0;
    int iterations = 0;
    bool converged = false;
    int segments = 1;
    SolvePath path = SolvePath::shooting;
    std::string diagnostics;
};

/// p0 + (p1 - p0)(3 t^2 - 2 t^3) and its exact derivatives.
StateVector smoothstep_state(double p0, double p1, double t);
/// 10 t^3 - 15 t^4 + 6 t^5 analogue of smoothstep_state.
StateVector quintic_state(double p0, double p1, double t);

/// Cubic smoothstep sampled on the solver grid.
TimeLaw initial_guess(const SolverConfig& config);

/// Classical RK4, step 1/n, from t = 0 to t = 1.
/// Throws SingularParameterization or IntegrationFailure.
Trajectory integrate_ivp(const CurveModel& curve, const StateVector& z_init, const SolverConfig& config);

/// Supplies state estimates at arbitrary t to seed shooting.
using SeedLaw = std::function<StateVector(double)>;

/// Damped Newton on the shooting map. The unknowns are ddp(0), dddp(0) plus the
/// full state at each interior segment start; the targets are p(1) = p1,
/// dp(1) = 0 and continuity between segments. One segment is plain single
/// shooting. Never throws on non-convergence: the report says converged = false.
SolutionReport shoot(const CurveModel& curve, const SolverConfig& config);
SolutionReport shoot(const CurveModel& curve, const SolverConfig& config, const SeedLaw& seed);

/// shoot(), falling back to the transcription oracle to re-seed one retry.
/// Throws NonConvergence when both attempts fail.
SolutionReport solve(const CurveModel& curve, const SolverConfig& config);

/// Segment count used when config.segments == 0.
int auto_segment_count(const CurveModel& curve, const SolverConfig& config, const SeedLaw& seed);

}  // namespace timelaw
