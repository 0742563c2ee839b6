#pragma once

#include "timelaw/simd/kernels.hpp"

namespace timelaw::simd::detail {

void central_differences_scalar(const double* ext, std::size_t count, double inv_2h, double inv_h2, double* v,
                                double* a);
void node_terms_scalar(const NodeInputs& in, const NodeOutputs& out, std::size_t count, double mass,
                       double alpha_m2);
void difference_adjoint_scalar(const double* wdp, const double* wdv, const double* wda, std::size_t count,
                               double inv_2h, double inv_h2, double* grad);

#ifdef TIMELAW_BUILD_AVX2
void central_differences_avx2(const double* ext, std::size_t count, double inv_2h, double inv_h2, double* v,
                              double* a);
void node_terms_avx2(const NodeInputs& in, const NodeOutputs& out, std::size_t count, double mass,
                     double alpha_m2);
void difference_adjoint_avx2(const double* wdp, const double* wdv, const double* wda, std::size_t count,
                             double inv_2h, double inv_h2, double* grad);
#endif

}  // namespace timelaw::simd::detail
