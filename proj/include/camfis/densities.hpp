#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "camfis/random.hpp"

namespace camfis {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Parameter vector theta in R^d.
using ParameterVector = Eigen::VectorXd;

/// Multivariate normal with a Cholesky-factored covariance. Immutable once
/// built, so it can be shared between threads.
class GaussianDistribution {
 public:
  /// Throws NotPositiveDefinite when the Cholesky factorization fails and
  /// DimensionError when mean and covariance disagree.
  GaussianDistribution(Vector mean, Matrix covariance);

  /// Zero-dimensional placeholder; only useful as a value to assign over.
  GaussianDistribution() = default;

  /// N(mean, variance * I).
  static GaussianDistribution isotropic(Vector mean, double variance);

  Eigen::Index dim() const noexcept { return mean_.size(); }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& covariance() const noexcept { return covariance_; }
  /// Lower-triangular L with L L^T = covariance.
  const Matrix& factor() const noexcept { return factor_; }
  double log_det() const noexcept { return log_det_; }
  bool is_diagonal() const noexcept { return diagonal_; }

  /// (x - mean)^T Sigma^{-1} (x - mean) through a triangular solve with L.
  double mahalanobis_sq(const Vector& x) const;

  /// Same quantity via the diagonal of Sigma. Only valid when is_diagonal().
  double mahalanobis_sq_diagonal(const Vector& x) const;

  /// Normalized log-density.
  double log_pdf(const Vector& x) const;

  /// mean + L z with z standard normal.
  Vector sample(RandomStream& rng) const;
  std::vector<Vector> sample(RandomStream& rng, std::size_t n) const;

 private:
  Vector mean_;
  Matrix covariance_;
  Matrix factor_;
  Vector inv_diagonal_;
  double log_det_ = 0.0;
  bool diagonal_ = false;
};

/// Standalone form of GaussianDistribution::log_pdf.
double gaussian_log_pdf(const GaussianDistribution& g, const ParameterVector& theta);

/// Standalone form of GaussianDistribution::sample.
std::vector<ParameterVector> gaussian_sample(const GaussianDistribution& g, RandomStream& rng, std::size_t n);

/// Un-normalized density exp(-potential(theta)), kept in log space.
///
/// Copies share one evaluation counter, so a potential handed to several
/// estimators reports the total number of evaluations made through any copy.
class PotentialDensity {
 public:
  using Function = std::function<double(const ParameterVector&)>;

  PotentialDensity(Function potential, Eigen::Index dim);

  /// Phi(theta). Increments the evaluation counter by one. Throws
  /// DimensionError on a size mismatch; model errors propagate.
  double operator()(const ParameterVector& theta) const;

  double log_density(const ParameterVector& theta) const { return -(*this)(theta); }

  Eigen::Index dim() const noexcept { return dim_; }
  std::uint64_t eval_count() const noexcept { return counter_->load(std::memory_order_relaxed); }

 private:
  Function potential_;
  Eigen::Index dim_;
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

/// Standalone form of PotentialDensity::operator().
inline double potential_eval(const PotentialDensity& p, const ParameterVector& theta) { return p(theta); }

/// Potential of a Gaussian up to its normalizing constant: 0.5 (x-m)^T S^{-1} (x-m).
PotentialDensity gaussian_potential(const GaussianDistribution& g);

}  // namespace camfis
