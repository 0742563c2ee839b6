#include "timelaw/bvp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "timelaw/errors.hpp"
#include "timelaw/oracle.hpp"

namespace timelaw {

void validate(const SolverConfig& c) {
    if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) throw ValidationError("alpha must be finite and > 0");
    if (!(c.mass > 0.0) || !std::isfinite(c.mass)) throw ValidationError("mass must be finite and > 0");
    if (!std::isfinite(c.p0) || !std::isfinite(c.p1)) throw ValidationError("p0 and p1 must be finite");
    if (c.n < 100 || c.n % 2 != 0) throw ValidationError("n must be even and >= 100");
    if (!(c.newton_tol > 0.0)) throw ValidationError("newton_tol must be > 0");
    if (c.max_newton_iters < 1) throw ValidationError("max_newton_iters must be >= 1");
    if (c.segments < 0 || c.segments > c.n / 2) throw ValidationError("segments must be in [0, n/2]");
}

TimeLaw Trajectory::law() const {
    std::vector<double> p(states.size());
    std::transform(states.begin(), states.end(), p.begin(), [](const StateVector& z) { return z.p; });
    return TimeLaw(std::move(p));
}

StateVector smoothstep_state(double p0, double p1, double t) {
    const double d = p1 - p0;
    return {p0 + d * t * t * (3.0 - 2.0 * t), d * 6.0 * t * (1.0 - t), d * (6.0 - 12.0 * t), -12.0 * d};
}

StateVector quintic_state(double p0, double p1, double t) {
    const double d = p1 - p0;
    const double t2 = t * t;
    return {p0 + d * t2 * t * (10.0 - 15.0 * t + 6.0 * t2), d * 30.0 * t2 * (1.0 - 2.0 * t + t2),
            d * 60.0 * t * (1.0 - 3.0 * t + 2.0 * t2), d * 60.0 * (1.0 - 6.0 * t + 6.0 * t2)};
}

TimeLaw initial_guess(const SolverConfig& config) {
    validate(config);
    std::vector<double> p(static_cast<std::size_t>(config.n) + 1);
    for (int i = 0; i <= config.n; ++i) {
        p[static_cast<std::size_t>(i)] = smoothstep_state(config.p0, config.p1, static_cast<double>(i) / config.n).p;
    }
    return TimeLaw(std::move(p));
}

namespace {

struct Dynamics {
    const CurveModel& curve;
    double alpha;
    double mass;
    RhsVariant variant;

    StateVector operator()(const StateVector& z) const { return rhs(curve, z, alpha, mass, variant); }
};

StateVector rk4_step(const Dynamics& f, const StateVector& z, double h) {
    const StateVector k1 = f(z);
    const StateVector k2 = f(z + (0.5 * h) * k1);
    const StateVector k3 = f(z + (0.5 * h) * k2);
    const StateVector k4 = f(z + h * k3);
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool finite(const StateVector& z) {
    return std::isfinite(z.p) && std::isfinite(z.dp) && std::isfinite(z.ddp) && std::isfinite(z.dddp);
}

// Integrates `steps` RK4 steps of size h from z. Appends every state after the
// first to `out` when given. Returns the final state.
StateVector integrate(const Dynamics& f, StateVector z, int steps, double h, std::vector<StateVector>* out) {
    for (int s = 0; s < steps; ++s) {
        z = rk4_step(f, z, h);
        if (!finite(z)) {
            throw IntegrationFailure("integration produced a non-finite state after " + std::to_string(s + 1) +
                                     " steps");
        }
        if (out) out->push_back(z);
    }
    return z;
}

std::array<double, 4> as_array(const StateVector& z) { return {z.p, z.dp, z.ddp, z.dddp}; }

// Multiple-shooting problem on the reporting grid.
class ShootingProblem {
public:
    ShootingProblem(const CurveModel& curve, const SolverConfig& config, int segments, double time_scale)
        : f_{curve, config.alpha, config.mass, config.variant},
          config_(config),
          h_(1.0 / config.n),
          segments_(segments) {
        bounds_.resize(static_cast<std::size_t>(segments) + 1);
        for (int k = 0; k <= segments; ++k) bounds_[static_cast<std::size_t>(k)] = (k * config.n) / segments;
        const double tau = time_scale;
        scale_ = {1.0, tau, tau * tau, tau * tau * tau};
    }

    [[nodiscard]] int unknowns() const { return 4 * segments_ - 2; }

    [[nodiscard]] Eigen::VectorXd seed_unknowns(const SeedLaw& seed) const {
        Eigen::VectorXd u(unknowns());
        const StateVector z0 = seed(0.0);
        u[0] = z0.ddp;
        u[1] = z0.dddp;
        for (int k = 1; k < segments_; ++k) {
            const auto z = as_array(seed(static_cast<double>(bound(k)) * h_));
            for (int c = 0; c < 4; ++c) u[offset(k) + c] = z[static_cast<std::size_t>(c)];
        }
        return u;
    }

    [[nodiscard]] StateVector start_state(const Eigen::VectorXd& u, int k) const {
        if (k == 0) return {config_.p0, 0.0, u[0], u[1]};
        const int o = offset(k);
        return {u[o], u[o + 1], u[o + 2], u[o + 3]};
    }

    [[nodiscard]] StateVector end_state(const Eigen::VectorXd& u, int k, std::vector<StateVector>* out = nullptr) const {
        return integrate(f_, start_state(u, k), bound(k + 1) - bound(k), h_, out);
    }

    // Residual rows of segment k's end: continuity with segment k + 1, or the
    // end conditions for the last segment.
    void segment_residual(const Eigen::VectorXd& u, int k, const StateVector& end, Eigen::VectorXd& r) const {
        const int row = 4 * k;
        if (k + 1 < segments_) {
            const auto e = as_array(end);
            const auto s = as_array(start_state(u, k + 1));
            for (int c = 0; c < 4; ++c) {
                r[row + c] = scale_[static_cast<std::size_t>(c)] * (e[static_cast<std::size_t>(c)] - s[static_cast<std::size_t>(c)]);
            }
        } else {
            r[row] = end.p - config_.p1;
            r[row + 1] = scale_[1] * end.dp;
        }
    }

    [[nodiscard]] Eigen::VectorXd residual(const Eigen::VectorXd& u) const {
        Eigen::VectorXd r(unknowns());
        for (int k = 0; k < segments_; ++k) segment_residual(u, k, end_state(u, k), r);
        return r;
    }

    [[nodiscard]] Eigen::MatrixXd jacobian(const Eigen::VectorXd& u, const Eigen::VectorXd& r) const {
        const int N = unknowns();
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);
        Eigen::VectorXd rp = r;
        for (int k = 0; k < segments_; ++k) {
            const int first = k == 0 ? 0 : offset(k);
            const int count = k == 0 ? 2 : 4;
            const int row = 4 * k;
            const int rows = k + 1 < segments_ ? 4 : 2;
            for (int j = first; j < first + count; ++j) {
                Eigen::VectorXd up = u;
                const double step = 1e-6 * std::max(1.0, std::abs(u[j]));
                up[j] += step;
                segment_residual(up, k, end_state(up, k), rp);
                for (int i = row; i < row + rows; ++i) J(i, j) = (rp[i] - r[i]) / (up[j] - u[j]);
                // Segment k's start also enters the continuity rows of segment k - 1.
                if (k > 0) {
                    const int c = j - first;
                    J(4 * (k - 1) + c, j) = -scale_[static_cast<std::size_t>(c)];
                }
            }
        }
        return J;
    }

    [[nodiscard]] Trajectory assemble(const Eigen::VectorXd& u) const {
        Trajectory traj;
        traj.states.reserve(static_cast<std::size_t>(config_.n) + 1);
        traj.states.push_back(start_state(u, 0));
        for (int k = 0; k < segments_; ++k) {
            if (k > 0) traj.states.back() = start_state(u, k);
            (void)end_state(u, k, &traj.states);
        }
        return traj;
    }

private:
    [[nodiscard]] int bound(int k) const { return bounds_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] static int offset(int k) { return 2 + 4 * (k - 1); }

    Dynamics f_;
    const SolverConfig& config_;
    double h_;
    int segments_;
    std::vector<int> bounds_;
    std::array<double, 4> scale_{};
};

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Largest rate among the linearized couplings of d(dddp)/dt along the seed.
double stiffness_rate(const CurveModel& curve, const SolverConfig& config, const SeedLaw& seed) {
    const double am = config.alpha * config.mass;
    double rate = 1.0;
    constexpr int samples = 256;
    for (int i = 0; i <= samples; ++i) {
        const StateVector z = seed(static_cast<double>(i) / samples);
        const GeometricCoefficients g = curve.regular_coefficients(z.p);
        const double W = config.variant == RhsVariant::paper_printed ? g.V + 4.0 * g.U : g.V;
        const double sg = g.S / g.G, tg = g.T / g.G, wg = W / g.G;
        const double z1 = z.dp, z2 = z.ddp, z3 = z.dddp;
        const double d_ddp = 1.0 / am - 6.0 * sg * z2 - 6.0 * tg * z1 * z1;
        const double d_dddp = -4.0 * sg * z1;
        const double d_dp = 2.0 * sg / am * z1 - 4.0 * sg * z3 - 12.0 * tg * z1 * z2 - 4.0 * wg * z1 * z1 * z1;
        rate = std::max({rate, std::sqrt(std::abs(d_ddp)), std::abs(d_dddp), std::cbrt(std::abs(d_dp))});
    }
    return rate;
}

}  // namespace

int auto_segment_count(const CurveModel& curve, const SolverConfig& config, const SeedLaw& seed) {
    // Keeps the growth across one segment near e^3.
    const double rate = stiffness_rate(curve, config, seed);
    const int k = static_cast<int>(std::ceil(rate / 3.0));
    return std::clamp(k, 1, config.n / 2);
}

Trajectory integrate_ivp(const CurveModel& curve, const StateVector& z_init, const SolverConfig& config) {
    validate(config);
    if (!finite(z_init)) throw ValidationError("initial state must be finite");
    const Dynamics f{curve, config.alpha, config.mass, config.variant};
    Trajectory traj;
    traj.states.reserve(static_cast<std::size_t>(config.n) + 1);
    traj.states.push_back(z_init);
    integrate(f, z_init, config.n, 1.0 / config.n, &traj.states);
    return traj;
}

SolutionReport shoot(const CurveModel& curve, const SolverConfig& config) {
    return shoot(curve, config, [&config](double t) { return smoothstep_state(config.p0, config.p1, t); });
}

SolutionReport shoot(const CurveModel& curve, const SolverConfig& config, const SeedLaw& seed) {
    validate(config);
    SolutionReport report;
    const double rate = stiffness_rate(curve, config, seed);
    report.segments = config.segments > 0 ? config.segments : auto_segment_count(curve, config, seed);
    const ShootingProblem problem(curve, config, report.segments, 1.0 / rate);
    const double target = config.newton_tol * std::max(1.0, std::abs(config.p1 - config.p0));

    Eigen::VectorXd u = problem.seed_unknowns(seed);
    Eigen::VectorXd r;
    std::ostringstream diag;
    try {
        r = problem.residual(u);
    } catch (const std::exception& e) {
        report.diagnostics = std::string("seed integration failed: ") + e.what();
        report.bc_residual = std::numeric_limits<double>::infinity();
        return report;
    }

    double merit = r.norm();
    // After the tolerance is met, a few more full steps while they still cut the
    // defect sharply; leftover joint gaps otherwise show up as spikes in el_residual.
    constexpr int kPolishSteps = 3;
    int polish = 0;
    while (report.iterations < config.max_newton_iters) {
        const bool polishing = inf_norm(r) <= target;
        if (polishing && polish++ == kPolishSteps) break;
        const double required = polishing ? 0.25 * merit : merit;
        Eigen::VectorXd delta;
        try {
            const Eigen::MatrixXd J = problem.jacobian(u, r);
            delta = J.colPivHouseholderQr().solve(-r);
        } catch (const std::exception& e) {
            diag << "jacobian failed: " << e.what() << "; ";
            break;
        }
        if (!delta.allFinite()) {
            diag << "singular shooting jacobian; ";
            break;
        }
        bool accepted = false;
        double lambda = 1.0;
        const int max_halvings = polishing ? 0 : 30;
        for (int halving = 0; halving <= max_halvings; ++halving, lambda *= 0.5) {
            const Eigen::VectorXd trial = u + lambda * delta;
            try {
                const Eigen::VectorXd rt = problem.residual(trial);
                const double mt = rt.norm();
                if (std::isfinite(mt) && mt < required) {
                    u = trial;
                    r = rt;
                    merit = mt;
                    accepted = true;
                    break;
                }
            } catch (const IntegrationFailure&) {
                // Overshoot; shorten the step.
            }
        }
        if (!accepted) {
            if (!polishing) diag << "no decrease after 30 step halvings; ";
            break;
        }
        ++report.iterations;
    }

    report.bc_residual = inf_norm(r);
    report.converged = report.bc_residual <= target;
    if (!report.converged && report.iterations >= config.max_newton_iters) {
        diag << "newton iteration limit reached; ";
    }
    try {
        report.trajectory = problem.assemble(u);
        report.cost = evaluate_cost(curve, report.trajectory.states, config.alpha, config.mass);
        report.el_residual_rms = rms(el_residual(curve, report.trajectory.states, config.alpha, config.mass));
    } catch (const std::exception& e) {
        report.converged = false;
        diag << "post-processing failed: " << e.what() << "; ";
    }
    diag << "segments=" << report.segments << " iterations=" << report.iterations
         << " residual=" << report.bc_residual;
    report.diagnostics = diag.str();
    return report;
}

namespace {

// Linear interpolation of differenced oracle samples.
SeedLaw seed_from_law(const TimeLaw& law) {
    const double h = law.step();
    auto d = differentiate_law(law.values(), h);
    auto jerk = differentiate_law(d.accel, h).rate;
    std::vector<StateVector> z(static_cast<std::size_t>(law.n()) + 1);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = {law.values()[i], d.rate[i], d.accel[i], jerk[i]};
    return [z = std::move(z), n = law.n()](double t) {
        const double x = std::clamp(t, 0.0, 1.0) * n;
        const int i = std::min(static_cast<int>(x), n - 1);
        const double w = x - i;
        const auto& a = z[static_cast<std::size_t>(i)];
        const auto& b = z[static_cast<std::size_t>(i) + 1];
        return (1.0 - w) * a + w * b;
    };
}

}  // namespace

SolutionReport solve(const CurveModel& curve, const SolverConfig& config) {
    SolutionReport first = shoot(curve, config);
    if (first.converged) return first;

    OracleConfig oc;
    oc.n = std::max(200, config.n);
    OracleResult oracle = oracle_minimize(curve, config.p0, config.p1, config.alpha, config.mass, oc);
    SolutionReport second = shoot(curve, config, seed_from_law(oracle.law));
    second.path = SolvePath::oracle_reseeded;
    if (second.converged) {
        second.diagnostics = "shooting from smoothstep failed (" + first.diagnostics + "); re-seeded from oracle";
        return second;
    }
    throw NonConvergence("shooting did not converge: [" + first.diagnostics + "]; oracle-seeded retry: [" +
                         second.diagnostics + "]; oracle grad_norm=" + std::to_string(oracle.grad_norm));
}

}  // namespace timelaw
