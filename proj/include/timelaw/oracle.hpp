#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "timelaw/cost.hpp"
#include "timelaw/curve.hpp"

namespace timelaw {

struct OracleConfig {
    int n = 400;                 // grid cells, even, >= 200
    double grad_tol = 1e-8;      // infinity norm of the reduced gradient
    int max_iters = 200000;
    double initial_step = 1.0;   // first trial step along the search direction
    double step_growth = 1.5;    // applied after an accepted step
    double step_shrink = 0.5;    // applied after a rejected trial
    double max_step = 1.0;
    int history = 12;            // curvature pairs kept for the search direction
};

void validate(const OracleConfig& config);

struct DiscreteCost {
    double value = 0.0;
    std::vector<double> gradient;  // with respect to p_2..p_{n-2}
};

/// Discretized cost under the rest-to-rest ghost convention (see discrete_objective).
DiscreteCost discretize_cost(const CurveModel& curve, std::span<const double> p_values, double alpha,
                             double mass);

enum class StopReason {
    gradient_tolerance,
    no_descent,  // no trial step lowers the cost in floating point
    iteration_limit,
};

std::string_view to_string(StopReason reason);

struct OracleResult {
    TimeLaw law;
    CostBreakdown cost;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;  // gradient tolerance met or cost stationary to working precision
    StopReason stop = StopReason::iteration_limit;
};

/// Called after every accepted iterate with (iteration, cost).
using OracleObserver = std::function<void(int, double)>;

/// Direct minimization of the discretized cost over p_2..p_{n-2}, starting from
/// the cubic smoothstep. Gradient information only: limited-memory secant
/// directions with a monotone accept/grow/shrink step rule. Returns the best
/// iterate; converged is false only when the iteration budget runs out.
OracleResult oracle_minimize(const CurveModel& curve, double p0, double p1, double alpha, double mass,
                             const OracleConfig& config = {}, const OracleObserver& observer = {});

}  // namespace timelaw
