#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "camfis/densities.hpp"
#include "camfis/error.hpp"
#include "camfis/random.hpp"

namespace camfis {

/// A normalized density we can sample from and evaluate in log space.
template <class B>
concept BiasingDensity = requires(const B& b, RandomStream& rng, const ParameterVector& x) {
  { b.log_pdf(x) } -> std::convertible_to<double>;
  { b.sample(rng) } -> std::convertible_to<ParameterVector>;
};

/// Samples together with their log importance weights log p~(x) - log q(x).
struct WeightedSampleSet {
  std::vector<ParameterVector> samples;
  std::vector<double> log_weights;

  std::size_t size() const noexcept { return samples.size(); }
};

/// Estimate of chi^2(p || q) + 1 from one batch of weights.
struct ChiSquareEstimate {
  double value_plus_one = 1.0;
  /// Delta-method standard error of value_plus_one.
  double std_error = 0.0;
  std::size_t sample_size = 0;
  double fidelity = 0.0;
};

/// Log weights of the given samples. One target evaluation per sample.
template <BiasingDensity B>
std::vector<double> log_weights(const PotentialDensity& target, const B& biasing,
                                std::span<const ParameterVector> samples) {
  std::vector<double> lw;
  lw.reserve(samples.size());
  for (const auto& x : samples) lw.push_back(-target(x) - biasing.log_pdf(x));
  return lw;
}

/// Draws m samples from the biasing density and weighs them against the target.
template <BiasingDensity B>
WeightedSampleSet draw_weighted(const PotentialDensity& target, const B& biasing, std::size_t m, RandomStream& rng) {
  WeightedSampleSet set;
  set.samples.reserve(m);
  for (std::size_t i = 0; i < m; ++i) set.samples.push_back(biasing.sample(rng));
  set.log_weights = log_weights(target, biasing, set.samples);
  return set;
}

/// sum f_i w_i / sum w_i with w_i = exp(log_w_i - max log_w).
///
/// Throws on an empty input, on NaN weights, and when every weight is zero
/// (every target potential was +inf): that only happens with a broken model,
/// so it is reported instead of returning 0.
double self_normalized_mean(std::span<const double> f_values, std::span<const double> log_w);

/// m sum w^2 / (sum w)^2 from log weights; always >= 1.
double chi2_from_log_weights(std::span<const double> log_w);

/// Delta-method standard error of chi2_from_log_weights.
double chi2_standard_error(std::span<const double> log_w);

template <class F, BiasingDensity B>
double self_normalized_estimate(F&& f, const PotentialDensity& target, const B& biasing,
                                std::span<const ParameterVector> samples) {
  if (samples.empty()) throw Error("self_normalized_estimate: empty sample list");
  const std::vector<double> lw = log_weights(target, biasing, samples);
  std::vector<double> fv;
  fv.reserve(samples.size());
  for (const auto& x : samples) fv.push_back(static_cast<double>(f(x)));
  return self_normalized_mean(fv, lw);
}

/// Multi-fidelity importance sampling estimate with m fresh samples from the
/// biasing density. Exactly m target evaluations; no surrogate evaluations.
template <class F, BiasingDensity B>
double mfis_estimate(F&& f, const PotentialDensity& target, const B& biasing, std::size_t m, RandomStream& rng) {
  if (m == 0) throw Error("mfis_estimate: m must be at least 1");
  std::vector<ParameterVector> samples;
  samples.reserve(m);
  for (std::size_t i = 0; i < m; ++i) samples.push_back(biasing.sample(rng));
  return self_normalized_estimate(std::forward<F>(f), target, biasing, std::span<const ParameterVector>(samples));
}

template <BiasingDensity B>
ChiSquareEstimate chi2_estimate(const PotentialDensity& target, const B& biasing, std::size_t m, RandomStream& rng,
                                double fidelity = 0.0) {
  if (m < 2) throw Error("chi2_estimate: m must be at least 2");
  const WeightedSampleSet set = draw_weighted(target, biasing, m, rng);
  ChiSquareEstimate est;
  est.value_plus_one = chi2_from_log_weights(set.log_weights);
  est.std_error = chi2_standard_error(set.log_weights);
  est.sample_size = m;
  est.fidelity = fidelity;
  return est;
}

/// m / (chi^2 + 1).
double effective_sample_size(double m, double chi2_plus_one);

/// 4 |f|_inf^2 (chi^2 + 1) / m.
double mse_bound(double f_sup, double m, double chi2_plus_one);

}  // namespace camfis
