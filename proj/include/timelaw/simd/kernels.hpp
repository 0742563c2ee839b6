#pragma once

// Elementwise kernels behind the discretized cost functional. Every kernel has a
// scalar reference and, on x86-64, an AVX2 variant chosen at runtime. The AVX2
// code performs the same operations in the same order without FMA contraction,
// so both variants produce bit-identical output.

#include <cstddef>
#include <string_view>

namespace timelaw::simd {

/// Per-node inputs of the discrete Lagrangian, structure-of-arrays.
struct NodeInputs {
    const double* G;
    const double* S;
    const double* Q;
    const double* T;
    const double* U;
    const double* v;  // dp/dt
    const double* a;  // d2p/dt2
};

/// Per-node outputs. kinetic = (m/2) G v^2, inertia = |d2r/dt2|^2,
/// d_p, d_v, d_a are the partials of kinetic + (alpha m^2 / 2) inertia.
struct NodeOutputs {
    double* kinetic;
    double* inertia;
    double* d_p;
    double* d_v;
    double* d_a;
};

struct KernelTable {
    std::string_view name;

    /// ext holds count + 2 samples; v[i], a[i] are the centered first and second
    /// differences around ext[i + 1].
    void (*central_differences)(const double* ext, std::size_t count, double inv_2h, double inv_h2, double* v,
                                double* a);

    void (*node_terms)(const NodeInputs& in, const NodeOutputs& out, std::size_t count, double mass,
                       double alpha_m2);

    /// Adjoint of central_differences. wdp, wdv, wda hold count + 2 weighted
    /// partials (index i + 1 is node i); grad[i] receives the total derivative
    /// with respect to the sample at node i.
    void (*difference_adjoint)(const double* wdp, const double* wdv, const double* wda, std::size_t count,
                               double inv_2h, double inv_h2, double* grad);
};

const KernelTable& scalar_kernels();
/// nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2_kernels();
/// The variant used by the library: AVX2 when available, else scalar.
/// Setting TIMELAW_FORCE_SCALAR=1 in the environment forces scalar.
const KernelTable& active_kernels();

}  // namespace timelaw::simd
