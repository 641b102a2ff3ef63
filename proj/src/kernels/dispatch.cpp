#include "kernels_internal.hpp"

#include <cstdlib>
#include <string_view>

namespace camfis::kernels {

const KernelTable* avx2_table() noexcept {
#if defined(CAMFIS_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept {
  static const KernelTable& table = [&]() -> const KernelTable& {
    if (const char* env = std::getenv("CAMFIS_SIMD"); env != nullptr && std::string_view(env) == "scalar") {
      return scalar_table();
    }
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return table;
}

double reduce_max(std::span<const double> x) { return active().reduce_max(x.data(), x.size()); }

ExpSums shifted_exp_sums(std::span<const double> log_w, double shift) {
  ExpSums r;
  active().exp_sums(log_w.data(), log_w.size(), shift, &r.sum_w, &r.sum_w2);
  return r;
}

WeightedSums shifted_weighted_sums(std::span<const double> log_w, std::span<const double> f,
                                   double shift) {
  WeightedSums r;
  const std::size_t n = log_w.size() < f.size() ? log_w.size() : f.size();
  active().weighted_sums(log_w.data(), f.data(), n, shift, &r.sum_w, &r.sum_fw);
  return r;
}

void exp(std::span<const double> x, std::span<double> out) {
  const std::size_t n = x.size() < out.size() ? x.size() : out.size();
  active().exp(x.data(), out.data(), n);
}

void smoothed_field(std::span<const double> values, double width, std::span<const double> xs,
                    std::span<double> out) {
  const std::size_t n = xs.size() < out.size() ? xs.size() : out.size();
  active().smoothed_field(values.data(), values.size(), width, xs.data(), out.data(), n);
}

}  // namespace camfis::kernels
