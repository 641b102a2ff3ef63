#pragma once

// Data-parallel inner loops used by the estimators and the forward models.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The variant is selected once at first use from the CPU feature
// flags; setting CAMFIS_SIMD=scalar in the environment forces the scalar
// path. Both variants are compiled into every build and tested against each
// other (tests/test_kernels.cpp).

#include <cstddef>
#include <span>

namespace camfis::kernels {

/// Raw-pointer entry points of one backend. The AVX2 translation unit is
/// compiled with -mavx2 -mfma and must not instantiate any inline library
/// templates, hence no spans here.
struct KernelTable {
  const char* name;
  double (*reduce_max)(const double* x, std::size_t n);
  void (*exp_sums)(const double* log_w, std::size_t n, double shift, double* sum_w, double* sum_w2);
  void (*weighted_sums)(const double* log_w, const double* f, std::size_t n, double shift,
                        double* sum_w, double* sum_fw);
  void (*exp)(const double* x, double* out, std::size_t n);
  void (*smoothed_field)(const double* values, std::size_t segments, double width, const double* xs,
                         double* out, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table() noexcept;

/// The backend used by the span-level functions below.
const KernelTable& active() noexcept;

struct ExpSums {
  double sum_w = 0.0;   // sum exp(l_i - shift)
  double sum_w2 = 0.0;  // sum exp(2 (l_i - shift))
};

struct WeightedSums {
  double sum_w = 0.0;   // sum exp(l_i - shift)
  double sum_fw = 0.0;  // sum f_i exp(l_i - shift)
};

/// Maximum entry; -inf for an empty span. NaN entries are ignored.
double reduce_max(std::span<const double> x);

ExpSums shifted_exp_sums(std::span<const double> log_w, double shift);

WeightedSums shifted_weighted_sums(std::span<const double> log_w, std::span<const double> f,
                                   double shift);

/// out[i] = exp(x[i]). out may alias x.
void exp(std::span<const double> x, std::span<double> out);

/// Smoothed piecewise-constant field on [0, 1] with values.size() equal-width
/// segments, evaluated at every xs[i]. Breakpoints are j / segments and the
/// blend between neighbours is a logistic of (x - breakpoint) / width.
void smoothed_field(std::span<const double> values, double width, std::span<const double> xs,
                    std::span<double> out);

}  // namespace camfis::kernels
