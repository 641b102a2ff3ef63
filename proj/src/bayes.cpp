#include "camfis/bayes.hpp"

#include <cmath>
#include <string>

#include "camfis/error.hpp"

namespace camfis {

ObservableMap SurrogateHierarchy::map(int n) const {
  const ProblemKind k = kind;
  return [k, n](const ParameterVector& theta) { return observe(k, theta, FidelityLevel{n}); };
}

Vector generate_data(const ObservableMap& high_fidelity, const ParameterVector& theta_truth,
                     const GaussianDistribution& noise, RandomStream& rng) {
  Vector y = high_fidelity(theta_truth);
  if (y.size() != noise.dim()) throw DimensionError("generate_data: noise dimension does not match observations");
  return y + noise.sample(rng);
}

InverseProblem make_inverse_problem(const InverseProblemSpec& spec, RandomStream& rng) {
  const auto d = static_cast<Eigen::Index>(observation_count(spec.hierarchy.kind));
  GaussianDistribution noise = GaussianDistribution::isotropic(Vector::Zero(d), spec.noise_variance);
  GaussianDistribution prior = GaussianDistribution::isotropic(spec.prior_mean, spec.prior_variance);
  Vector y = generate_data(spec.hierarchy.high_fidelity_map(), spec.theta_truth, noise, rng);
  return InverseProblem{spec.hierarchy, std::move(y), std::move(noise), std::move(prior), spec.theta_truth};
}

namespace {

double quadratic(const GaussianDistribution& g, const Vector& x) {
  return g.is_diagonal() ? g.mahalanobis_sq_diagonal(x) : g.mahalanobis_sq(x);
}

}  // namespace

double posterior_potential(const Vector& data, const GaussianDistribution& noise, const GaussianDistribution& prior,
                           const ObservableMap& map, const ParameterVector& theta) {
  const Vector g = map(theta);
  if (g.size() != data.size()) throw DimensionError("posterior_potential: model output has the wrong dimension");
  // noise has zero mean, so the quadratic form of (y - G) is the misfit.
  const double misfit = quadratic(noise, data - g);
  const double value = 0.5 * misfit + 0.5 * quadratic(prior, theta);
  if (std::isnan(value)) throw ModelError("posterior_potential: NaN");
  return value;
}

double posterior_potential(const InverseProblem& problem, const ParameterVector& theta, int n) {
  return posterior_potential(problem.data, problem.noise, problem.prior, problem.hierarchy.map(n), theta);
}

PotentialDensity make_potential(const InverseProblem& problem, int n) {
  const ProblemKind kind = problem.hierarchy.kind;
  // Captured by value so the potential stays valid independent of `problem`.
  return PotentialDensity(
      [kind, n, data = problem.data, noise = problem.noise, prior = problem.prior](const ParameterVector& theta) {
        const Vector g = observe(kind, theta, FidelityLevel{n});
        const double misfit = noise.is_diagonal() ? noise.mahalanobis_sq_diagonal(data - g)
                                                  : noise.mahalanobis_sq(data - g);
        const double reg = prior.is_diagonal() ? prior.mahalanobis_sq_diagonal(theta) : prior.mahalanobis_sq(theta);
        return 0.5 * misfit + 0.5 * reg;
      },
      problem.prior.dim());
}

double TestFunction::operator()(const ParameterVector& theta) const {
  if (theta.size() != center.size()) throw DimensionError("test function: dimension mismatch");
  return (theta - center).dot(direction) >= 0.0 ? 1.0 : -1.0;
}

Vector leading_eigenvector(const Matrix& covariance) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance);
  if (eig.info() != Eigen::Success) throw Error("leading_eigenvector: eigensolver did not converge");
  // Eigenvalues come sorted ascending.
  Vector v = eig.eigenvectors().col(covariance.cols() - 1).normalized();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0.0) v = -v;
      break;
    }
  }
  return v;
}

TestFunction make_test_function(const GaussianDistribution& laplace) {
  return TestFunction{laplace.mean(), leading_eigenvector(laplace.covariance())};
}

}  // namespace camfis
