#include "kernels_internal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace camfis::kernels {
namespace {

double max_scalar(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] > m) m = x[i];
  }
  return m;
}

void exp_sums_scalar(const double* log_w, std::size_t n, double shift, double* sum_w, double* sum_w2) {
  double s = 0.0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::exp(log_w[i] - shift);
    s += w;
    s2 += w * w;
  }
  *sum_w = s;
  *sum_w2 = s2;
}

void weighted_sums_scalar(const double* log_w, const double* f, std::size_t n, double shift,
                          double* sum_w, double* sum_fw) {
  double s = 0.0;
  double sf = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::exp(log_w[i] - shift);
    s += w;
    sf += f[i] * w;
  }
  *sum_w = s;
  *sum_fw = sf;
}

void exp_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

void smoothed_field_scalar(const double* values, std::size_t segments, double width, const double* xs,
                           double* out, std::size_t n) {
  const double inv_width = 1.0 / width;
  for (std::size_t p = 0; p < n; ++p) {
    const double x = xs[p];
    double k = values[0];
    for (std::size_t j = 1; j < segments; ++j) {
      const double alpha = static_cast<double>(j) / static_cast<double>(segments);
      const double neg_t = std::min(-(x - alpha) * inv_width, kLogisticClamp);
      const double ind = 1.0 / (1.0 + std::exp(neg_t));
      k = (1.0 - ind) * k + ind * values[j];
    }
    out[p] = k;
  }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{
      "scalar", max_scalar, exp_sums_scalar, weighted_sums_scalar, exp_scalar, smoothed_field_scalar,
  };
  return table;
}

}  // namespace camfis::kernels
