#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace timelaw::simd {

namespace {

bool cpu_has_avx2() {
#if defined(TIMELAW_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

bool force_scalar() {
    const char* env = std::getenv("TIMELAW_FORCE_SCALAR");
    return env != nullptr && std::string_view(env) != "" && std::string_view(env) != "0";
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", detail::central_differences_scalar, detail::node_terms_scalar,
                                   detail::difference_adjoint_scalar};
    return table;
}

const KernelTable* avx2_kernels() {
#ifdef TIMELAW_BUILD_AVX2
    static const KernelTable table{"avx2", detail::central_differences_avx2, detail::node_terms_avx2,
                                   detail::difference_adjoint_avx2};
    static const bool supported = cpu_has_avx2();
    return supported ? &table : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active_kernels() {
    static const KernelTable& chosen = [] () -> const KernelTable& {
        if (!force_scalar()) {
            if (const KernelTable* t = avx2_kernels()) return *t;
        }
        return scalar_kernels();
    }();
    return chosen;
}

}  // namespace timelaw::simd
