#include "camfis/importance_sampling.hpp"

#include <cmath>
#include <limits>

#include "camfis/kernels.hpp"

namespace camfis {
namespace {

// Shift for exp(log_w - shift). Rejects NaN and the all -inf case.
double weight_shift(std::span<const double> log_w, const char* who) {
  if (log_w.empty()) throw Error(std::string(who) + ": empty weight list");
  for (double l : log_w) {
    if (std::isnan(l)) throw ModelError(std::string(who) + ": NaN log weight");
  }
  const double shift = kernels::reduce_max(log_w);
  if (shift == -std::numeric_limits<double>::infinity()) {
    throw ModelError(std::string(who) + ": all importance weights are zero (target potential is +inf everywhere)");
  }
  if (shift == std::numeric_limits<double>::infinity()) {
    throw ModelError(std::string(who) + ": infinite log weight");
  }
  return shift;
}

}  // namespace

double self_normalized_mean(std::span<const double> f_values, std::span<const double> log_w) {
  if (f_values.size() != log_w.size()) throw DimensionError("self_normalized_mean: size mismatch");
  const double shift = weight_shift(log_w, "self_normalized_mean");
  const kernels::WeightedSums s = kernels::shifted_weighted_sums(log_w, f_values, shift);
  return s.sum_fw / s.sum_w;
}

double chi2_from_log_weights(std::span<const double> log_w) {
  const double shift = weight_shift(log_w, "chi2_estimate");
  const kernels::ExpSums s = kernels::shifted_exp_sums(log_w, shift);
  const double value = static_cast<double>(log_w.size()) * s.sum_w2 / (s.sum_w * s.sum_w);
  // Cauchy-Schwarz gives >= 1; rounding can land a hair below.
  return value < 1.0 ? 1.0 : value;
}

double chi2_standard_error(std::span<const double> log_w) {
  const double shift = weight_shift(log_w, "chi2_standard_error");
  const double m = static_cast<double>(log_w.size());
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (double l : log_w) {
    const double w = std::exp(l - shift);
    const double w2 = w * w;
    s1 += w;
    s2 += w2;
    s3 += w2 * w;
    s4 += w2 * w2;
  }
  const double b = s1 / m;
  const double a = s2 / m;
  const double var_w = a - b * b;
  const double var_w2 = s4 / m - a * a;
  const double cov = s3 / m - a * b;
  const double b2 = b * b;
  const double var_r =
      (var_w2 / (b2 * b2) - 4.0 * a * cov / (b2 * b2 * b) + 4.0 * a * a * var_w / (b2 * b2 * b2)) / m;
  return var_r > 0.0 ? std::sqrt(var_r) : 0.0;
}

double effective_sample_size(double m, double chi2_plus_one) {
  if (m < 1.0 || chi2_plus_one < 1.0) throw Error("effective_sample_size: need m >= 1 and chi2+1 >= 1");
  return m / chi2_plus_one;
}

double mse_bound(double f_sup, double m, double chi2_plus_one) {
  if (f_sup < 0.0 || m < 1.0) throw Error("mse_bound: need f_sup >= 0 and m >= 1");
  return 4.0 * f_sup * f_sup * chi2_plus_one / m;
}

}  // namespace camfis
