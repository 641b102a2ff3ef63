#pragma once

#include <cstdint>
#include <optional>

#include "camfis/densities.hpp"
#include "camfis/error.hpp"

namespace camfis {

struct NewtonConfig {
  /// Finite-difference step. With relative_step the step for coordinate i
  /// is fd_step * (1 + |theta_i|).
  double fd_step = 1e-5;
  bool relative_step = true;
  /// Converged when |grad|_2 <= grad_tol.
  double grad_tol = 1e-8;
  int max_iter = 100;
  double backtrack_factor = 0.5;
  int max_backtracks = 40;

  void validate() const;
};

struct ModeResult {
  ParameterVector mode;
  double value = 0.0;  // potential at the mode
  std::uint64_t model_evals = 0;
  int iterations = 0;  // accepted Newton steps
  double final_grad_norm = 0.0;
  /// Stopped because no step could decrease the potential while the Newton
  /// decrement was below its round-off level, rather than on grad_tol.
  bool stalled = false;
};

struct LaplaceResult {
  GaussianDistribution approximation;
  std::uint64_t model_evals = 0;  // M: every potential evaluation, final Hessian included
  int iterations = 0;
  double final_grad_norm = 0.0;
};

class NewtonDidNotConverge : public Error {
 public:
  NewtonDidNotConverge(const std::string& what, ParameterVector last) : Error(what), last_iterate(std::move(last)) {}
  ParameterVector last_iterate;
};

/// Central-difference gradient; 2d potential evaluations.
/// Throws ModelError naming the coordinate if a stencil value is not finite.
Vector fd_gradient(const PotentialDensity& phi, const ParameterVector& theta, double step);
Vector fd_gradient(const PotentialDensity& phi, const ParameterVector& theta, const Vector& steps);

/// Second-order finite-difference Hessian; 1 + 2d + 2d(d-1) evaluations.
Matrix fd_hessian(const PotentialDensity& phi, const ParameterVector& theta, double step);
Matrix fd_hessian(const PotentialDensity& phi, const ParameterVector& theta, const Vector& steps,
                  double* center_value = nullptr);

/// Damped Newton on the potential with finite-difference derivatives.
ModeResult find_mode(const PotentialDensity& phi, const ParameterVector& theta0, const NewtonConfig& cfg = {});

/// Gaussian with the mode as mean and the inverse finite-difference Hessian
/// at the mode as covariance. Throws NotPositiveDefinite when the Hessian at
/// the mode is not SPD: the approximation does not exist there.
LaplaceResult laplace_approximation(const PotentialDensity& phi, const ParameterVector& theta0,
                                    const NewtonConfig& cfg = {});

}  // namespace camfis
