#pragma once

#include <functional>
#include <vector>

#include "camfis/densities.hpp"
#include "camfis/forward_models.hpp"
#include "camfis/laplace.hpp"
#include "camfis/random.hpp"

namespace camfis {

/// Observable map at one fidelity.
using ObservableMap = std::function<Vector(const ParameterVector&)>;

/// Forward models indexed by fidelity n plus the designated high-fidelity n.
struct SurrogateHierarchy {
  ProblemKind kind = ProblemKind::heat;
  std::vector<int> fidelities;  // candidate surrogate resolutions
  int high_fidelity = 256;

  ObservableMap map(int n) const;
  ObservableMap high_fidelity_map() const { return map(high_fidelity); }
  static double h_of(int n) { return 1.0 / static_cast<double>(n); }
};

struct InverseProblemSpec {
  SurrogateHierarchy hierarchy;
  ParameterVector theta_truth;
  double noise_variance = 1e-5;
  ParameterVector prior_mean;
  double prior_variance = 0.1;
};

/// Bayesian inverse problem with Gaussian noise and Gaussian prior. Immutable
/// once the data have been generated.
struct InverseProblem {
  SurrogateHierarchy hierarchy;
  Vector data;
  GaussianDistribution noise;  // N(0, Gamma)
  GaussianDistribution prior;
  ParameterVector theta_truth;
};

/// y = G(theta_truth) + eta with eta ~ N(0, noise) drawn from rng.
Vector generate_data(const ObservableMap& high_fidelity, const ParameterVector& theta_truth,
                     const GaussianDistribution& noise, RandomStream& rng);

/// Builds the problem and draws its single observation.
InverseProblem make_inverse_problem(const InverseProblemSpec& spec, RandomStream& rng);

/// 0.5 |y - G_n(theta)|^2_{Gamma^-1} + 0.5 (theta - mu)^T Sigma^-1 (theta - mu).
double posterior_potential(const InverseProblem& problem, const ParameterVector& theta, int n);

/// Same potential from an explicit map (used for synthetic and test problems).
double posterior_potential(const Vector& data, const GaussianDistribution& noise, const GaussianDistribution& prior,
                           const ObservableMap& map, const ParameterVector& theta);

/// Posterior potential at fidelity n wrapped with evaluation counting.
PotentialDensity make_potential(const InverseProblem& problem, int n);

/// f(theta) = +1 if (theta - center) . direction >= 0 else -1.
struct TestFunction {
  ParameterVector center;
  Vector direction;

  double operator()(const ParameterVector& theta) const;
};

/// Unit eigenvector of the largest eigenvalue of the covariance, signed so
/// its first component with magnitude above 1e-12 is positive. With a repeated top eigenvalue
/// the eigensolver's last column is used.
Vector leading_eigenvector(const Matrix& covariance);

TestFunction make_test_function(const GaussianDistribution& laplace);
inline TestFunction make_test_function(const LaplaceResult& lap) { return make_test_function(lap.approximation); }

inline double test_function_eval(const TestFunction& tf, const ParameterVector& theta) { return tf(theta); }

}  // namespace camfis
