#include "pra/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace pra::kernels {

bool avx2_available()
{
#if defined(PRA_HAVE_AVX2_KERNEL) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

CellStepFn select_cell_step()
{
    if (const char* env = std::getenv("PRA_KERNEL"); env && std::string_view(env) == "scalar")
        return &cell_step_scalar;
#if defined(PRA_HAVE_AVX2_KERNEL)
    if (avx2_available())
        return &cell_step_avx2;
#endif
    return &cell_step_scalar;
}

const char* kernel_name(CellStepFn fn)
{
#if defined(PRA_HAVE_AVX2_KERNEL)
    if (fn == &cell_step_avx2)
        return "avx2";
#endif
    return fn == &cell_step_scalar ? "scalar" : "unknown";
}

} // namespace pra::kernels
