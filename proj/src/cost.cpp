#include "timelaw/cost.hpp"

#include <cmath>
#include <string>

#include "timelaw/errors.hpp"
#include "timelaw/simd/kernels.hpp"

namespace timelaw {

namespace {

void require_weights(double alpha, double mass) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be finite and > 0");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw ValidationError("mass must be finite and > 0");
}

void require_grid(std::size_t samples) {
    if (samples < 5 || (samples - 1) % 2 != 0) {
        throw ValidationError("grid must have an even number of cells, at least 4 (got " +
                              std::to_string(static_cast<long>(samples) - 1) + ")");
    }
}

}  // namespace

TimeLaw::TimeLaw(std::vector<double> p_values) : values_(std::move(p_values)) {
    require_grid(values_.size());
    for (double v : values_) {
        if (!std::isfinite(v)) throw ValidationError("time law contains a non-finite value");
    }
}

Kinematics chain_kinematics(const DerivativeTable& d, const StateVector& z, double dddp_rate) {
    const double z1 = z.dp, z2 = z.ddp, z3 = z.dddp;
    const double z1sq = z1 * z1;
    Kinematics k;
    k.vx = d.x[1] * z1;
    k.vy = d.y[1] * z1;
    k.ax = d.x[2] * z1sq + d.x[1] * z2;
    k.ay = d.y[2] * z1sq + d.y[1] * z2;
    k.jx = d.x[3] * z1sq * z1 + 3.0 * d.x[2] * z1 * z2 + d.x[1] * z3;
    k.jy = d.y[3] * z1sq * z1 + 3.0 * d.y[2] * z1 * z2 + d.y[1] * z3;
    k.sx = d.x[4] * z1sq * z1sq + 6.0 * d.x[3] * z1sq * z2 + 4.0 * d.x[2] * z1 * z3 + 3.0 * d.x[2] * z2 * z2 +
           d.x[1] * dddp_rate;
    k.sy = d.y[4] * z1sq * z1sq + 6.0 * d.y[3] * z1sq * z2 + 4.0 * d.y[2] * z1 * z3 + 3.0 * d.y[2] * z2 * z2 +
           d.y[1] * dddp_rate;
    return k;
}

std::vector<double> simpson_weights(int n, double h) {
    require_grid(static_cast<std::size_t>(n) + 1);
    std::vector<double> w(static_cast<std::size_t>(n) + 1);
    const double third = h / 3.0;
    for (int i = 0; i <= n; ++i) {
        const double c = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        w[static_cast<std::size_t>(i)] = c * third;
    }
    return w;
}

double simpson(std::span<const double> samples, double h) {
    require_grid(samples.size());
    const auto w = simpson_weights(static_cast<int>(samples.size()) - 1, h);
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) sum += w[i] * samples[i];
    return sum;
}

LawDerivatives differentiate_law(std::span<const double> p, double h) {
    const std::size_t count = p.size();
    if (count < 4) throw ValidationError("law needs at least 4 samples to differentiate");
    const std::size_t n = count - 1;
    LawDerivatives out{std::vector<double>(count), std::vector<double>(count)};
    const double h2 = h * h;
    for (std::size_t i = 1; i < n; ++i) {
        out.rate[i] = (p[i + 1] - p[i - 1]) / (2.0 * h);
        out.accel[i] = ((p[i + 1] - p[i]) - (p[i] - p[i - 1])) / h2;
    }
    // One-sided stencils written on differences from the end sample, so a
    // constant law differentiates to exactly zero.
    auto from = [&p](std::size_t end, std::size_t i) { return p[i] - p[end]; };
    out.rate[0] = (4.0 * from(0, 1) - from(0, 2)) / (2.0 * h);
    out.rate[n] = -(4.0 * from(n, n - 1) - from(n, n - 2)) / (2.0 * h);
    out.accel[0] = (-5.0 * from(0, 1) + 4.0 * from(0, 2) - from(0, 3)) / h2;
    out.accel[n] = (-5.0 * from(n, n - 1) + 4.0 * from(n, n - 2) - from(n, n - 3)) / h2;
    return out;
}

namespace {

CostBreakdown integrate_cost(const CurveModel& curve, std::span<const double> p, std::span<const double> rate,
                             std::span<const double> accel, double alpha, double mass) {
    const int n = static_cast<int>(p.size()) - 1;
    const double h = 1.0 / n;
    std::vector<double> kinetic(p.size()), inertia(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const GeometricCoefficients g = curve.regular_coefficients(p[i]);
        const double v = rate[i], a = accel[i];
        const double v2 = v * v;
        kinetic[i] = 0.5 * mass * g.G * v2;
        inertia[i] = g.Q * v2 * v2 + 2.0 * g.S * v2 * a + g.G * a * a;
    }
    CostBreakdown c;
    c.kinetic = simpson(kinetic, h);
    c.inertia_measure = simpson(inertia, h);
    c.total = c.kinetic + 0.5 * alpha * mass * mass * c.inertia_measure;
    return c;
}

}  // namespace

CostBreakdown evaluate_cost(const CurveModel& curve, const TimeLaw& law, double alpha, double mass) {
    require_weights(alpha, mass);
    const auto d = differentiate_law(law.values(), law.step());
    return integrate_cost(curve, law.values(), d.rate, d.accel, alpha, mass);
}

CostBreakdown evaluate_cost(const CurveModel& curve, std::span<const StateVector> states, double alpha,
                            double mass) {
    require_weights(alpha, mass);
    require_grid(states.size());
    std::vector<double> p(states.size()), rate(states.size()), accel(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        p[i] = states[i].p;
        rate[i] = states[i].dp;
        accel[i] = states[i].ddp;
    }
    return integrate_cost(curve, p, rate, accel, alpha, mass);
}

FTerms f_terms(const CurveModel& curve, const StateVector& z, double alpha, double mass) {
    const DerivativeTable d = curve.derivatives(z.p);
    const Kinematics k = chain_kinematics(d, z);
    const double am2 = alpha * mass * mass;
    const double v = z.dp, a = z.ddp;
    const double vel_dot_x2 = k.vx * d.x[2] + k.vy * d.y[2];
    const double acc_dot_x3 = k.ax * d.x[3] + k.ay * d.y[3];
    const double acc_dot_x2 = k.ax * d.x[2] + k.ay * d.y[2];
    const double vel_dot_x1 = k.vx * d.x[1] + k.vy * d.y[1];
    const double acc_dot_x1 = k.ax * d.x[1] + k.ay * d.y[1];
    FTerms f;
    f.f1 = mass * vel_dot_x2 * v + am2 * acc_dot_x3 * v * v + am2 * acc_dot_x2 * a;
    f.f2 = mass * vel_dot_x1 + 2.0 * am2 * acc_dot_x2 * v;
    f.f3 = am2 * acc_dot_x1;
    return f;
}

std::vector<double> el_residual(const CurveModel& curve, std::span<const StateVector> states, double alpha,
                                double mass) {
    if (states.size() < 9) throw ValidationError("el_residual needs a grid of at least 8 cells");
    const std::size_t n = states.size() - 1;
    const double h = 1.0 / static_cast<double>(n);
    std::vector<FTerms> f(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) f[i] = f_terms(curve, states[i], alpha, mass);

    std::vector<double> r;
    r.reserve(n - 3);
    for (std::size_t i = 2; i + 2 <= n; ++i) {
        const double df2 = (f[i - 2].f2 - 8.0 * f[i - 1].f2 + 8.0 * f[i + 1].f2 - f[i + 2].f2) / (12.0 * h);
        const double ddf3 = (-f[i - 2].f3 + 16.0 * f[i - 1].f3 - 30.0 * f[i].f3 + 16.0 * f[i + 1].f3 - f[i + 2].f3) /
                            (12.0 * h * h);
        r.push_back(f[i].f1 - df2 + ddf3);
    }
    return r;
}

double rms(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum / static_cast<double>(values.size()));
}

void apply_rest_convention(std::span<double> p) {
    require_grid(p.size());
    const std::size_t n = p.size() - 1;
    p[1] = 0.25 * (3.0 * p[0] + p[2]);
    p[n - 1] = 0.25 * (3.0 * p[n] + p[n - 2]);
}

DiscreteObjective discrete_objective(const CurveModel& curve, std::span<const double> p_in, double alpha,
                                     double mass, bool with_gradient) {
    require_weights(alpha, mass);
    require_grid(p_in.size());
    const std::size_t count = p_in.size();
    const std::size_t n = count - 1;
    const double h = 1.0 / static_cast<double>(n);
    const double inv_2h = 0.5 / h;
    const double inv_h2 = 1.0 / (h * h);
    const double am2 = alpha * mass * mass;
    const auto& kernels = simd::active_kernels();

    // ext[i + 1] = p_i, with the ghost samples at both ends.
    std::vector<double> ext(count + 2);
    std::copy(p_in.begin(), p_in.end(), ext.begin() + 1);
    apply_rest_convention(std::span<double>(ext.data() + 1, count));
    ext[0] = ext[2];
    ext[count + 1] = ext[count - 1];

    std::vector<double> v(count), a(count);
    kernels.central_differences(ext.data(), count, inv_2h, inv_h2, v.data(), a.data());

    std::vector<double> G(count), S(count), Q(count), T(count), U(count);
    for (std::size_t i = 0; i < count; ++i) {
        const GeometricCoefficients g = curve.regular_coefficients(ext[i + 1]);
        G[i] = g.G;
        S[i] = g.S;
        Q[i] = g.Q;
        T[i] = g.T;
        U[i] = g.U;
    }

    std::vector<double> kinetic(count), inertia(count), dp(count), dv(count), da(count);
    kernels.node_terms({G.data(), S.data(), Q.data(), T.data(), U.data(), v.data(), a.data()},
                       {kinetic.data(), inertia.data(), dp.data(), dv.data(), da.data()}, count, mass, am2);

    // Trapezoid weights: alternating Simpson weights let the centered stencils
    // trade odd against even nodes and produce spurious minimizers.
    std::vector<double> w(count, h);
    w.front() = w.back() = 0.5 * h;
    DiscreteObjective out;
    // Compensated sums keep the value resolvable near the minimizer.
    double kin = 0.0, ine = 0.0, kin_c = 0.0, ine_c = 0.0;
    auto neumaier = [](double& sum, double& comp, double x) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    };
    for (std::size_t i = 0; i < count; ++i) {
        neumaier(kin, kin_c, w[i] * kinetic[i]);
        neumaier(ine, ine_c, w[i] * inertia[i]);
    }
    kin += kin_c;
    ine += ine_c;
    out.parts.kinetic = kin;
    out.parts.inertia_measure = ine;
    out.parts.total = kin + 0.5 * am2 * ine;
    out.value = out.parts.total;
    if (!with_gradient) return out;

    // Weighted partials padded by one zero on each side; wdx[i + 1] is node i.
    std::vector<double> wdp(count + 2, 0.0), wdv(count + 2, 0.0), wda(count + 2, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        wdp[i + 1] = w[i] * dp[i];
        wdv[i + 1] = w[i] * dv[i];
        wda[i + 1] = w[i] * da[i];
    }
    // The end velocities are identically zero, and the end accelerations read
    // their inner neighbour twice (ghost reflection).
    wdv[1] = 0.0;
    wdv[count] = 0.0;
    std::vector<double> full(count);
    kernels.difference_adjoint(wdp.data(), wdv.data(), wda.data(), count, inv_2h, inv_h2, full.data());
    full[1] += wda[1] * inv_h2;
    full[n - 1] += wda[count] * inv_h2;

    // Chain rule through p_1 = (3 p_0 + p_2)/4 and p_{n-1} = (3 p_n + p_{n-2})/4.
    out.gradient.assign(full.begin() + 2, full.begin() + static_cast<std::ptrdiff_t>(n - 1));
    out.gradient.front() += 0.25 * full[1];
    out.gradient.back() += 0.25 * full[n - 1];
    return out;
}

std::vector<double> discrete_gradient(const CurveModel& curve, const TimeLaw& law, double alpha, double mass) {
    return discrete_objective(curve, law.values(), alpha, mass, true).gradient;
}

}  // namespace timelaw
