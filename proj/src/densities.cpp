#include "camfis/densities.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "camfis/error.hpp"

namespace camfis {

GaussianDistribution::GaussianDistribution(Vector mean, Matrix covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  const Eigen::Index d = mean_.size();
  if (d < 1) throw DimensionError("GaussianDistribution: empty mean");
  if (covariance_.rows() != d || covariance_.cols() != d) {
    throw DimensionError("GaussianDistribution: covariance is " + std::to_string(covariance_.rows()) + "x" +
                         std::to_string(covariance_.cols()) + ", mean has dimension " + std::to_string(d));
  }
  if (!covariance_.isApprox(covariance_.transpose(), 1e-12)) {
    throw NotPositiveDefinite("GaussianDistribution: covariance is not symmetric");
  }
  Eigen::LLT<Matrix> llt(covariance_);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("GaussianDistribution: covariance is not positive definite");
  }
  factor_ = llt.matrixL();
  log_det_ = 2.0 * factor_.diagonal().array().log().sum();

  const Matrix off = covariance_ - Matrix(covariance_.diagonal().asDiagonal());
  diagonal_ = off.cwiseAbs().maxCoeff() == 0.0;
  if (diagonal_) inv_diagonal_ = covariance_.diagonal().cwiseInverse();
}

GaussianDistribution GaussianDistribution::isotropic(Vector mean, double variance) {
  const Eigen::Index d = mean.size();
  return GaussianDistribution(std::move(mean), variance * Matrix::Identity(d, d));
}

double GaussianDistribution::mahalanobis_sq(const Vector& x) const {
  if (x.size() != dim()) {
    throw DimensionError("Gaussian: argument has dimension " + std::to_string(x.size()) + ", expected " +
                         std::to_string(dim()));
  }
  const Vector z = factor_.triangularView<Eigen::Lower>().solve(x - mean_);
  return z.squaredNorm();
}

double GaussianDistribution::mahalanobis_sq_diagonal(const Vector& x) const {
  if (!diagonal_) throw Error("Gaussian: diagonal quadratic form requested for a full covariance");
  if (x.size() != dim()) throw DimensionError("Gaussian: dimension mismatch");
  return ((x - mean_).array().square() * inv_diagonal_.array()).sum();
}

double GaussianDistribution::log_pdf(const Vector& x) const {
  const double d = static_cast<double>(dim());
  return -0.5 * mahalanobis_sq(x) - 0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det_);
}

Vector GaussianDistribution::sample(RandomStream& rng) const {
  Vector z(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) z[i] = rng.normal();
  return mean_ + factor_.triangularView<Eigen::Lower>() * z;
}

std::vector<Vector> GaussianDistribution::sample(RandomStream& rng, std::size_t n) const {
  std::vector<Vector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample(rng));
  return out;
}

double gaussian_log_pdf(const GaussianDistribution& g, const ParameterVector& theta) { return g.log_pdf(theta); }

std::vector<ParameterVector> gaussian_sample(const GaussianDistribution& g, RandomStream& rng, std::size_t n) {
  if (n == 0) throw Error("gaussian_sample: n must be at least 1");
  return g.sample(rng, n);
}

PotentialDensity::PotentialDensity(Function potential, Eigen::Index dim)
    : potential_(std::move(potential)), dim_(dim), counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (dim_ < 1) throw DimensionError("PotentialDensity: dimension must be at least 1");
}

double PotentialDensity::operator()(const ParameterVector& theta) const {
  if (theta.size() != dim_) {
    throw DimensionError("potential: argument has dimension " + std::to_string(theta.size()) + ", expected " +
                         std::to_string(dim_));
  }
  counter_->fetch_add(1, std::memory_order_relaxed);
  return potential_(theta);
}

PotentialDensity gaussian_potential(const GaussianDistribution& g) {
  return PotentialDensity([g](const ParameterVector& theta) { return 0.5 * g.mahalanobis_sq(theta); }, g.dim());
}

}  // namespace camfis
