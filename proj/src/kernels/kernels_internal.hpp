#pragma once

#include "camfis/kernels.hpp"

namespace camfis::kernels {

// Logistic arguments are clamped so exp never overflows; 1/(1+e^700) is
// already far below any meaningful field contribution.
inline constexpr double kLogisticClamp = 700.0;

namespace detail {
// Defined in kernels_avx2.cpp when the AVX2 variant is compiled in.
const KernelTable& avx2_table_unchecked() noexcept;
}  // namespace detail

}  // namespace camfis::kernels
