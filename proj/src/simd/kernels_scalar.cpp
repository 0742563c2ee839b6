#include "kernels_impl.hpp"

namespace timelaw::simd::detail {

void central_differences_scalar(const double* ext, std::size_t count, double inv_2h, double inv_h2, double* v,
                                double* a) {
    for (std::size_t i = 0; i < count; ++i) {
        const double prev = ext[i];
        const double mid = ext[i + 1];
        const double next = ext[i + 2];
        v[i] = (next - prev) * inv_2h;
        a[i] = ((next - 2.0 * mid) + prev) * inv_h2;
    }
}

void node_terms_scalar(const NodeInputs& in, const NodeOutputs& out, std::size_t count, double mass,
                       double alpha_m2) {
    const double half_mass = 0.5 * mass;
    for (std::size_t i = 0; i < count; ++i) {
        const double G = in.G[i], S = in.S[i], Q = in.Q[i], T = in.T[i], U = in.U[i];
        const double v = in.v[i], a = in.a[i];
        const double v2 = v * v;
        const double v4 = v2 * v2;
        const double Sv2 = S * v2;
        const double Ga = G * a;

        out.kinetic[i] = half_mass * (G * v2);
        out.inertia[i] = (Q * v4 + 2.0 * (Sv2 * a)) + Ga * a;
        out.d_p[i] = mass * Sv2 + alpha_m2 * ((U * v4 + (Q + T) * (v2 * a)) + S * (a * a));
        out.d_v[i] = mass * (G * v) + alpha_m2 * (2.0 * (Q * (v2 * v)) + 2.0 * (S * (v * a)));
        out.d_a[i] = alpha_m2 * (Sv2 + Ga);
    }
}

void difference_adjoint_scalar(const double* wdp, const double* wdv, const double* wda, std::size_t count,
                               double inv_2h, double inv_h2, double* grad) {
    for (std::size_t i = 0; i < count; ++i) {
        const double first = (wdv[i] - wdv[i + 2]) * inv_2h;
        const double second = ((wda[i] - 2.0 * wda[i + 1]) + wda[i + 2]) * inv_h2;
        grad[i] = (wdp[i + 1] + first) + second;
    }
}

}  // namespace timelaw::simd::detail
