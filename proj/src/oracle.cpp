#include "timelaw/oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "timelaw/bvp.hpp"
#include "timelaw/errors.hpp"

namespace timelaw {

void validate(const OracleConfig& c) {
    if (c.n < 200 || c.n % 2 != 0) throw ValidationError("oracle n must be even and >= 200");
    if (!(c.grad_tol > 0.0)) throw ValidationError("grad_tol must be > 0");
    if (c.max_iters < 1) throw ValidationError("max_iters must be >= 1");
    if (!(c.initial_step > 0.0) || !(c.max_step > 0.0)) throw ValidationError("step sizes must be > 0");
    if (!(c.step_growth >= 1.0) || !(c.step_shrink > 0.0 && c.step_shrink < 1.0)) {
        throw ValidationError("step_growth must be >= 1 and step_shrink in (0, 1)");
    }
    if (c.history < 0) throw ValidationError("history must be >= 0");
}

DiscreteCost discretize_cost(const CurveModel& curve, std::span<const double> p_values, double alpha,
                             double mass) {
    DiscreteObjective obj = discrete_objective(curve, p_values, alpha, mass, true);
    return {obj.value, std::move(obj.gradient)};
}

std::string_view to_string(StopReason reason) {
    switch (reason) {
        case StopReason::gradient_tolerance: return "gradient_tolerance";
        case StopReason::no_descent: return "no_descent";
        case StopReason::iteration_limit: return "iteration_limit";
    }
    return "unknown";
}

namespace {

using Vec = std::vector<double>;

constexpr int kMaxFlatSteps = 200;  // consecutive accepted ties

double dot(const Vec& a, const Vec& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

double inf_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct CurvaturePair {
    Vec s;
    Vec y;
    double rho;
};

// Fixed SPD model of the cost's curvature on the free nodes,
//   h (c4 D2^T D2 + c2 D1^T D1),
// with D1, D2 the difference stencils of discrete_objective (rest convention
// included) and c4 = alpha m^2 <G>, c2 = m <G>. Search directions are gradients
// in the metric it defines, which removes the h^-4 spread of the plain gradient.
class SobolevMetric {
public:
    SobolevMetric(int n, double c2, double c4) {
        const int F = n - 3;
        const double h = 1.0 / n;
        // Column of node i among the free variables, with p_1 and p_{n-1} folded in.
        auto add = [&](std::vector<Eigen::Triplet<double>>& rows, int row, int node, double value) {
            if (node >= 2 && node <= n - 2) {
                rows.emplace_back(row, node - 2, value);
            } else if (node == 1) {
                rows.emplace_back(row, 0, 0.25 * value);
            } else if (node == n - 1) {
                rows.emplace_back(row, F - 1, 0.25 * value);
            }
        };
        std::vector<Eigen::Triplet<double>> d1, d2;
        const double inv_2h = 0.5 / h, inv_h2 = 1.0 / (h * h);
        for (int i = 0; i <= n; ++i) {
            if (i == 0 || i == n) {
                add(d2, i, i == 0 ? 1 : n - 1, 2.0 * inv_h2);
                continue;
            }
            add(d1, i, i + 1, inv_2h);
            add(d1, i, i - 1, -inv_2h);
            add(d2, i, i + 1, inv_h2);
            add(d2, i, i, -2.0 * inv_h2);
            add(d2, i, i - 1, inv_h2);
        }
        Eigen::SparseMatrix<double> D1(n + 1, F), D2(n + 1, F);
        D1.setFromTriplets(d1.begin(), d1.end());
        D2.setFromTriplets(d2.begin(), d2.end());
        Eigen::SparseMatrix<double> M = (h * c4) * Eigen::SparseMatrix<double>(D2.transpose() * D2) +
                                        (h * c2) * Eigen::SparseMatrix<double>(D1.transpose() * D1);
        solver_.compute(M);
        if (solver_.info() != Eigen::Success) throw NonConvergence("oracle metric factorization failed");
    }

    [[nodiscard]] Vec solve(const Vec& g) const {
        const Eigen::Map<const Eigen::VectorXd> rhs(g.data(), static_cast<Eigen::Index>(g.size()));
        const Eigen::VectorXd x = solver_.solve(rhs);
        return Vec(x.data(), x.data() + x.size());
    }

private:
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

// Two-loop recursion with the metric as the initial inverse-curvature model.
Vec search_direction(const Vec& g, const std::deque<CurvaturePair>& pairs, const SobolevMetric& metric) {
    Vec q = g;
    std::vector<double> alphas(pairs.size());
    for (std::size_t i = pairs.size(); i-- > 0;) {
        alphas[i] = pairs[i].rho * dot(pairs[i].s, q);
        for (std::size_t j = 0; j < q.size(); ++j) q[j] -= alphas[i] * pairs[i].y[j];
    }
    q = metric.solve(q);
    if (!pairs.empty()) {
        const auto& last = pairs.back();
        const double scale = dot(last.s, last.y) / dot(last.y, metric.solve(last.y));
        for (double& x : q) x *= scale;
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double beta = pairs[i].rho * dot(pairs[i].y, q);
        for (std::size_t j = 0; j < q.size(); ++j) q[j] += pairs[i].s[j] * (alphas[i] - beta);
    }
    for (double& x : q) x = -x;
    return q;
}

}  // namespace

OracleResult oracle_minimize(const CurveModel& curve, double p0, double p1, double alpha, double mass,
                             const OracleConfig& config, const OracleObserver& observer) {
    validate(config);
    if (!(alpha > 0.0) || !(mass > 0.0)) throw ValidationError("alpha and mass must be > 0");
    if (!std::isfinite(p0) || !std::isfinite(p1)) throw ValidationError("p0 and p1 must be finite");

    const int n = config.n;
    Vec p(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) p[static_cast<std::size_t>(i)] = smoothstep_state(p0, p1, static_cast<double>(i) / n).p;
    p.front() = p0;
    p.back() = p1;
    apply_rest_convention(p);

    const std::size_t free_count = static_cast<std::size_t>(n) - 3;
    auto free_view = [&p]() { return std::span<double>(p.data() + 2, p.size() - 4); };

    double mean_G = 0.0;
    for (double x : p) mean_G += curve.regular_coefficients(x).G;
    mean_G /= static_cast<double>(p.size());
    const SobolevMetric metric(n, mass * mean_G, alpha * mass * mass * mean_G);

    DiscreteCost current = discretize_cost(curve, p, alpha, mass);
    std::deque<CurvaturePair> pairs;
    double step = config.initial_step;
    OracleResult result{TimeLaw(p), {}, inf_norm(current.gradient), 0, false, StopReason::iteration_limit};

    Vec trial_p = p;
    int flat_steps = 0;
    while (result.iterations < config.max_iters) {
        result.grad_norm = inf_norm(current.gradient);
        if (result.grad_norm <= config.grad_tol) {
            result.stop = StopReason::gradient_tolerance;
            break;
        }
        Vec dir = search_direction(current.gradient, pairs, metric);
        if (!(dot(dir, current.gradient) < 0.0)) {
            pairs.clear();
            dir = search_direction(current.gradient, pairs, metric);
        }

        bool accepted = false;
        DiscreteCost next;
        double used = step;
        for (int attempt = 0; attempt < 60; ++attempt) {
            trial_p = p;
            auto tf = std::span<double>(trial_p.data() + 2, free_count);
            for (std::size_t j = 0; j < free_count; ++j) tf[j] += used * dir[j];
            apply_rest_convention(trial_p);
            try {
                next = discretize_cost(curve, trial_p, alpha, mass);
                // Monotone: a tie is accepted only when it reduces the gradient,
                // which lets the iteration finish below the rounding level of J.
                if (std::isfinite(next.value) &&
                    (next.value < current.value ||
                     (next.value == current.value && inf_norm(next.gradient) < inf_norm(current.gradient)))) {
                    accepted = true;
                    break;
                }
            } catch (const SingularParameterization&) {
            }
            used *= config.step_shrink;
        }
        if (!accepted) {
            if (!pairs.empty()) {
                pairs.clear();
                step = config.initial_step;
                continue;
            }
            result.stop = StopReason::no_descent;
            break;
        }

        CurvaturePair pair{Vec(free_count), Vec(free_count), 0.0};
        auto old_free = free_view();
        for (std::size_t j = 0; j < free_count; ++j) {
            pair.s[j] = trial_p[j + 2] - old_free[j];
            pair.y[j] = next.gradient[j] - current.gradient[j];
        }
        const double sy = dot(pair.s, pair.y);
        if (sy > 1e-300) {
            pair.rho = 1.0 / sy;
            pairs.push_back(std::move(pair));
            if (static_cast<int>(pairs.size()) > config.history) pairs.pop_front();
        }

        flat_steps = next.value < current.value ? 0 : flat_steps + 1;
        if (flat_steps > kMaxFlatSteps) {
            result.stop = StopReason::no_descent;
            break;
        }
        p.swap(trial_p);
        current = std::move(next);
        ++result.iterations;
        step = std::min(config.max_step, used * config.step_growth);
        if (observer) observer(result.iterations, current.value);
    }
    result.grad_norm = inf_norm(current.gradient);
    if (result.grad_norm <= config.grad_tol) result.stop = StopReason::gradient_tolerance;
    result.converged = result.stop != StopReason::iteration_limit;

    result.law = TimeLaw(p);
    result.cost = discrete_objective(curve, p, alpha, mass, false).parts;
    return result;
}

}  // namespace timelaw
