#include <immintrin.h>

#include "kernels_impl.hpp"

namespace timelaw::simd::detail {

void central_differences_avx2(const double* ext, std::size_t count, double inv_2h, double inv_h2, double* v,
                              double* a) {
    const __m256d k2h = _mm256_set1_pd(inv_2h);
    const __m256d kh2 = _mm256_set1_pd(inv_h2);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        const __m256d prev = _mm256_loadu_pd(ext + i);
        const __m256d mid = _mm256_loadu_pd(ext + i + 1);
        const __m256d next = _mm256_loadu_pd(ext + i + 2);
        _mm256_storeu_pd(v + i, _mm256_mul_pd(_mm256_sub_pd(next, prev), k2h));
        const __m256d second = _mm256_add_pd(_mm256_sub_pd(next, _mm256_mul_pd(two, mid)), prev);
        _mm256_storeu_pd(a + i, _mm256_mul_pd(second, kh2));
    }
    if (i < count) central_differences_scalar(ext + i, count - i, inv_2h, inv_h2, v + i, a + i);
}

void node_terms_avx2(const NodeInputs& in, const NodeOutputs& out, std::size_t count, double mass,
                     double alpha_m2) {
    const __m256d km = _mm256_set1_pd(mass);
    const __m256d khalf = _mm256_set1_pd(0.5 * mass);
    const __m256d kam2 = _mm256_set1_pd(alpha_m2);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        const __m256d G = _mm256_loadu_pd(in.G + i);
        const __m256d S = _mm256_loadu_pd(in.S + i);
        const __m256d Q = _mm256_loadu_pd(in.Q + i);
        const __m256d T = _mm256_loadu_pd(in.T + i);
        const __m256d U = _mm256_loadu_pd(in.U + i);
        const __m256d v = _mm256_loadu_pd(in.v + i);
        const __m256d a = _mm256_loadu_pd(in.a + i);

        const __m256d v2 = _mm256_mul_pd(v, v);
        const __m256d v4 = _mm256_mul_pd(v2, v2);
        const __m256d Sv2 = _mm256_mul_pd(S, v2);
        const __m256d Ga = _mm256_mul_pd(G, a);

        _mm256_storeu_pd(out.kinetic + i, _mm256_mul_pd(khalf, _mm256_mul_pd(G, v2)));

        __m256d inertia = _mm256_add_pd(_mm256_mul_pd(Q, v4), _mm256_mul_pd(two, _mm256_mul_pd(Sv2, a)));
        inertia = _mm256_add_pd(inertia, _mm256_mul_pd(Ga, a));
        _mm256_storeu_pd(out.inertia + i, inertia);

        __m256d dp = _mm256_add_pd(_mm256_mul_pd(U, v4),
                                   _mm256_mul_pd(_mm256_add_pd(Q, T), _mm256_mul_pd(v2, a)));
        dp = _mm256_add_pd(dp, _mm256_mul_pd(S, _mm256_mul_pd(a, a)));
        dp = _mm256_add_pd(_mm256_mul_pd(km, Sv2), _mm256_mul_pd(kam2, dp));
        _mm256_storeu_pd(out.d_p + i, dp);

        __m256d dv = _mm256_add_pd(_mm256_mul_pd(two, _mm256_mul_pd(Q, _mm256_mul_pd(v2, v))),
                                   _mm256_mul_pd(two, _mm256_mul_pd(S, _mm256_mul_pd(v, a))));
        dv = _mm256_add_pd(_mm256_mul_pd(km, _mm256_mul_pd(G, v)), _mm256_mul_pd(kam2, dv));
        _mm256_storeu_pd(out.d_v + i, dv);

        _mm256_storeu_pd(out.d_a + i, _mm256_mul_pd(kam2, _mm256_add_pd(Sv2, Ga)));
    }
    if (i < count) {
        const NodeInputs tail_in{in.G + i, in.S + i, in.Q + i, in.T + i, in.U + i, in.v + i, in.a + i};
        const NodeOutputs tail_out{out.kinetic + i, out.inertia + i, out.d_p + i, out.d_v + i, out.d_a + i};
        node_terms_scalar(tail_in, tail_out, count - i, mass, alpha_m2);
    }
}

void difference_adjoint_avx2(const double* wdp, const double* wdv, const double* wda, std::size_t count,
                             double inv_2h, double inv_h2, double* grad) {
    const __m256d k2h = _mm256_set1_pd(inv_2h);
    const __m256d kh2 = _mm256_set1_pd(inv_h2);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        const __m256d first = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(wdv + i), _mm256_loadu_pd(wdv + i + 2)), k2h);
        const __m256d lo = _mm256_loadu_pd(wda + i);
        const __m256d mid = _mm256_loadu_pd(wda + i + 1);
        const __m256d hi = _mm256_loadu_pd(wda + i + 2);
        const __m256d second = _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(lo, _mm256_mul_pd(two, mid)), hi), kh2);
        _mm256_storeu_pd(grad + i, _mm256_add_pd(_mm256_add_pd(_mm256_loadu_pd(wdp + i + 1), first), second));
    }
    if (i < count) difference_adjoint_scalar(wdp + i, wdv + i, wda + i, count - i, inv_2h, inv_h2, grad + i);
}

}  // namespace timelaw::simd::detail
