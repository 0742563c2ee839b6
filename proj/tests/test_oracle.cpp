#include <random>

#include "doctest.h"
#include "support.hpp"
#include "timelaw/bvp.hpp"
#include "timelaw/errors.hpp"
#include "timelaw/oracle.hpp"

using namespace timelaw;
using support::pi;

namespace {

OracleConfig grid(int n) {
    OracleConfig c;
    c.n = n;
    return c;
}

}  // namespace

TEST_CASE("oracle config validation") {
    CHECK_NOTHROW(validate(OracleConfig{}));
    CHECK_THROWS_AS(validate(grid(198)), ValidationError);
    CHECK_THROWS_AS(validate(grid(401)), ValidationError);
    OracleConfig c;
    c.grad_tol = -1;
    CHECK_THROWS_AS(validate(c), ValidationError);
    c = OracleConfig{};
    c.step_shrink = 1.5;
    CHECK_THROWS_AS(validate(c), ValidationError);
}

TEST_CASE("discretize_cost") {
    SUBCASE("constant sequence") {
        const DiscreteCost d = discretize_cost(make_curve(EllipseParams{1, 2}), std::vector<double>(201, 0.7), 0.1, 1.0);
        CHECK(d.value == 0.0);
        for (double g : d.gradient) CHECK(g == 0.0);
    }
    SUBCASE("smoothstep on a flat line") {
        for (double alpha : {0.01, 0.1}) {
            std::vector<double> p(4001);
            for (int i = 0; i <= 4000; ++i) p[static_cast<std::size_t>(i)] = smoothstep_state(0, 1, i / 4000.0).p;
            const DiscreteCost d = discretize_cost(make_curve(LineParams{0, 0}), p, alpha, 1.0);
            CHECK(d.value == doctest::Approx(0.6 + 6 * alpha).epsilon(1e-4));
        }
    }
    SUBCASE("random laws against central differences") {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> u(-0.2, 0.2);
        const CurveModel c = make_curve(ParabolaParams{1, 0});
        std::vector<double> p(201);
        for (int i = 0; i <= 200; ++i) {
            const double t = i / 200.0;
            p[static_cast<std::size_t>(i)] = smoothstep_state(0, 1, t).p + u(rng) * std::sin(pi * t);
        }
        const DiscreteCost d = discretize_cost(c, p, 0.05, 1.0);
        double scale = 0.0;
        for (double g : d.gradient) scale = std::max(scale, std::abs(g));
        double worst = 0.0;
        for (std::size_t j = 0; j < d.gradient.size(); ++j) {
            const double h = 1e-5;
            auto at = [&](double off) {
                auto q = p;
                q[j + 2] += off;
                return discretize_cost(c, q, 0.05, 1.0).value;
            };
            const double fd = (8 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12 * h);
            worst = std::max(worst, std::abs(fd - d.gradient[j]) / std::max(std::abs(fd), 1e-3 * scale));
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("oracle on the flat line against the analytic law") {
    const CurveModel c = make_curve(LineParams{0, 0});
    const OracleResult r = oracle_minimize(c, 0.0, 1.0, 0.01, 1.0, grid(400));
    CHECK(r.converged);
    CHECK(r.stop != StopReason::iteration_limit);
    const LineLaw law = line_analytic(0.0, 1.0, 0.01, 1.0);
    std::vector<StateVector> exact(401);
    double dev = 0.0;
    for (int i = 0; i <= 400; ++i) {
        exact[static_cast<std::size_t>(i)] = law.at(i / 400.0);
        dev = std::max(dev, std::abs(r.law[i] - exact[static_cast<std::size_t>(i)].p));
    }
    const double j_exact = evaluate_cost(c, exact, 0.01, 1.0).total;
    CHECK(support::rel(evaluate_cost(c, r.law, 0.01, 1.0).total, j_exact) <= 1e-3);
    CHECK(dev <= 1e-3);
}

TEST_CASE("oracle with zero displacement") {
    const OracleResult r = oracle_minimize(make_curve(CircleParams{1}), 0.4, 0.4, 0.01, 1.0, grid(200));
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    for (double v : r.law.values()) CHECK(v == 0.4);
    CHECK(r.cost.total == 0.0);
}

TEST_CASE("oracle boundary conditions and descent") {
    std::vector<double> trace;
    const OracleResult r = oracle_minimize(make_curve(EllipseParams{1, 2}), 0.0, 2 * pi, 0.01, 1.0, grid(400),
                                           [&trace](int, double J) { trace.push_back(J); });
    REQUIRE(!trace.empty());
    CHECK(trace.size() == static_cast<std::size_t>(r.iterations));
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);

    const auto p = r.law.values();
    const std::size_t n = p.size() - 1;
    CHECK(p[0] == 0.0);
    CHECK(p[n] == 2 * pi);
    // second-order one-sided velocity vanishes at both ends
    CHECK(std::abs(-3 * p[0] + 4 * p[1] - p[2]) <= 1e-12);
    CHECK(std::abs(3 * p[n] - 4 * p[n - 1] + p[n - 2]) <= 1e-12);
}

TEST_CASE("semicircle: oracle against the boundary value solver") {
    const CurveModel c = make_curve(CircleParams{1});
    const OracleResult r = oracle_minimize(c, 0.0, pi, 0.01, 1.0, grid(400));
    CHECK(r.converged);
    const int n = r.law.n();
    double sym = 0.0;
    for (int i = 0; i <= n; ++i) sym = std::max(sym, std::abs(r.law[i] + r.law[n - i] - pi));
    CHECK(sym <= 1e-4);

    SolverConfig sc;
    sc.alpha = 0.01;
    sc.p1 = pi;
    sc.n = 400;
    const SolutionReport bvp = solve(c, sc);
    CHECK(support::rel(evaluate_cost(c, r.law, 0.01, 1.0).total, bvp.cost.total) <= 1e-3);
}

TEST_CASE("oracle agrees with the boundary value solver on every family") {
    for (const auto& f : support::families()) {
        for (double alpha : {1e-2, 1e-1}) {
            CAPTURE(f.name);
            CAPTURE(alpha);
            const CurveModel c = make_curve(f.spec);
            const OracleResult r = oracle_minimize(c, f.p0, f.p1, alpha, 1.0, grid(400));
            CHECK(r.converged);
            SolverConfig sc;
            sc.alpha = alpha;
            sc.p0 = f.p0;
            sc.p1 = f.p1;
            sc.n = 2000;
            const SolutionReport bvp = solve(c, sc);
            CHECK(support::rel(evaluate_cost(c, r.law, alpha, 1.0).total, bvp.cost.total) <= 1e-3);
            double dev = 0.0;
            for (int i = 0; i <= 400; ++i)
                dev = std::max(dev, std::abs(r.law[i] - bvp.trajectory.states[static_cast<std::size_t>(5 * i)].p));
            CHECK(dev <= 1e-2 * std::abs(f.p1 - f.p0));
        }
    }
}

TEST_CASE("iteration budget") {
    OracleConfig c = grid(400);
    c.max_iters = 2;
    const OracleResult r = oracle_minimize(make_curve(EllipseParams{1, 2}), 0.0, 2 * pi, 0.01, 1.0, c);
    CHECK_FALSE(r.converged);
    CHECK(r.stop == StopReason::iteration_limit);
    CHECK(r.iterations == 2);
    CHECK(to_string(r.stop) == "iteration_limit");
}
