#include "camfis/laplace.hpp"

#include <cmath>
#include <string>

namespace camfis {
namespace {

constexpr double kStallDecrement = 1e-10;

Vector stencil_steps(const ParameterVector& theta, const NewtonConfig& cfg) {
  Vector steps(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    steps[i] = cfg.relative_step ? cfg.fd_step * (1.0 + std::abs(theta[i])) : cfg.fd_step;
  }
  return steps;
}

double checked(const PotentialDensity& phi, const ParameterVector& x, Eigen::Index coord, const char* who) {
  const double v = phi(x);
  if (!std::isfinite(v)) {
    throw ModelError(std::string(who) + ": non-finite potential at stencil point along coordinate " +
                     std::to_string(coord));
  }
  return v;
}

std::uint64_t gradient_evals(Eigen::Index d) { return static_cast<std::uint64_t>(2 * d); }

std::uint64_t hessian_evals(Eigen::Index d) { return static_cast<std::uint64_t>(1 + 2 * d + 2 * d * (d - 1)); }

}  // namespace

void NewtonConfig::validate() const {
  if (!(fd_step > 0.0)) throw ConfigError("NewtonConfig: fd_step must be positive");
  if (!(grad_tol > 0.0)) throw ConfigError("NewtonConfig: grad_tol must be positive");
  if (max_iter < 1) throw ConfigError("NewtonConfig: max_iter must be at least 1");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw ConfigError("NewtonConfig: backtrack_factor must lie in (0, 1)");
  }
  if (max_backtracks < 0) throw ConfigError("NewtonConfig: max_backtracks must be nonnegative");
}

Vector fd_gradient(const PotentialDensity& phi, const ParameterVector& theta, double step) {
  return fd_gradient(phi, theta, Vector::Constant(theta.size(), step));
}

Vector fd_gradient(const PotentialDensity& phi, const ParameterVector& theta, const Vector& steps) {
  if (steps.size() != theta.size()) throw DimensionError("fd_gradient: steps/theta size mismatch");
  const Eigen::Index d = theta.size();
  Vector g(d);
  ParameterVector x = theta;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(steps[i] > 0.0)) throw Error("fd_gradient: step must be positive");
    const double xp = theta[i] + steps[i];
    const double xm = theta[i] - steps[i];
    x[i] = xp;
    const double fp = checked(phi, x, i, "fd_gradient");
    x[i] = xm;
    const double fm = checked(phi, x, i, "fd_gradient");
    x[i] = theta[i];
    g[i] = (fp - fm) / (xp - xm);
  }
  return g;
}

Matrix fd_hessian(const PotentialDensity& phi, const ParameterVector& theta, double step) {
  return fd_hessian(phi, theta, Vector::Constant(theta.size(), step));
}

Matrix fd_hessian(const PotentialDensity& phi, const ParameterVector& theta, const Vector& steps,
                  double* center_value) {
  if (steps.size() != theta.size()) throw DimensionError("fd_hessian: steps/theta size mismatch");
  const Eigen::Index d = theta.size();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(steps[i] > 0.0)) throw Error("fd_hessian: step must be positive");
  }
  Matrix h(d, d);
  ParameterVector x = theta;
  const double f0 = checked(phi, x, 0, "fd_hessian");
  if (center_value != nullptr) *center_value = f0;

  for (Eigen::Index i = 0; i < d; ++i) {
    const double s = steps[i];
    x[i] = theta[i] + s;
    const double fp = checked(phi, x, i, "fd_hessian");
    x[i] = theta[i] - s;
    const double fm = checked(phi, x, i, "fd_hessian");
    x[i] = theta[i];
    h(i, i) = (fp - 2.0 * f0 + fm) / (s * s);
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double si = steps[i];
      const double sj = steps[j];
      x[i] = theta[i] + si;
      x[j] = theta[j] + sj;
      const double fpp = checked(phi, x, i, "fd_hessian");
      x[j] = theta[j] - sj;
      const double fpm = checked(phi, x, i, "fd_hessian");
      x[i] = theta[i] - si;
      const double fmm = checked(phi, x, i, "fd_hessian");
      x[j] = theta[j] + sj;
      const double fmp = checked(phi, x, i, "fd_hessian");
      x[i] = theta[i];
      x[j] = theta[j];
      h(i, j) = h(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * si * sj);
    }
  }
  return h;
}

ModeResult find_mode(const PotentialDensity& phi, const ParameterVector& theta0, const NewtonConfig& cfg) {
  cfg.validate();
  const Eigen::Index d = theta0.size();
  if (d != phi.dim()) throw DimensionError("find_mode: theta0 has the wrong dimension");

  ModeResult res;
  ParameterVector theta = theta0;
  double value = 0.0;

  for (;;) {
    const Vector g = fd_gradient(phi, theta, stencil_steps(theta, cfg));
    res.model_evals += gradient_evals(d);
    const double gnorm = g.norm();
    if (gnorm <= cfg.grad_tol) {
      res.final_grad_norm = gnorm;
      break;
    }
    if (res.iterations >= cfg.max_iter) {
      throw NewtonDidNotConverge("find_mode: no convergence after " + std::to_string(cfg.max_iter) +
                                     " iterations (|grad| = " + std::to_string(gnorm) + ")",
                                 theta);
    }

    Matrix h = fd_hessian(phi, theta, stencil_steps(theta, cfg), &value);
    res.model_evals += hessian_evals(d);

    // Newton direction; shift the Hessian by lambda I while it is indefinite.
    Eigen::LLT<Matrix> llt(h);
    if (llt.info() != Eigen::Success) {
      double lambda = 1e-8 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
      bool ok = false;
      for (int k = 0; k < 10 && !ok; ++k, lambda *= 10.0) {
        llt.compute(h + lambda * Matrix::Identity(d, d));
        ok = llt.info() == Eigen::Success;
      }
      if (!ok) throw NotPositiveDefinite("find_mode: Hessian regularization failed");
    }
    const Vector step = llt.solve(-g);

    double alpha = 1.0;
    bool accepted = false;
    ParameterVector trial(d);
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt, alpha *= cfg.backtrack_factor) {
      trial = theta + alpha * step;
      const double v = phi(trial);
      ++res.model_evals;
      if (std::isfinite(v) && v < value) {
        value = v;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Predicted decrease below the round-off of the potential: the gradient
      // is finite-difference noise and theta is the mode to working precision.
      const double decrement = -0.5 * g.dot(step);
      if (decrement <= kStallDecrement * (1.0 + std::abs(value))) {
        res.final_grad_norm = gnorm;
        res.stalled = true;
        break;
      }
      throw NewtonDidNotConverge("find_mode: line search found no decrease (|grad| = " + std::to_string(gnorm) + ")",
                                 theta);
    }
    theta = trial;
    ++res.iterations;
  }

  res.mode = theta;
  if (res.iterations > 0 || res.stalled) {
    res.value = value;
  } else {
    res.value = phi(theta);
    ++res.model_evals;
  }
  return res;
}

LaplaceResult laplace_approximation(const PotentialDensity& phi, const ParameterVector& theta0,
                                    const NewtonConfig& cfg) {
  const ModeResult mode = find_mode(phi, theta0, cfg);
  const Eigen::Index d = mode.mode.size();
  const Matrix h = fd_hessian(phi, mode.mode, stencil_steps(mode.mode, cfg));

  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("laplace_approximation: Hessian at the mode is not positive definite; "
                              "the Laplace approximation does not exist");
  }
  const Matrix l = llt.matrixL();
  const Matrix l_inv = l.triangularView<Eigen::Lower>().solve(Matrix::Identity(d, d));
  Matrix cov = l_inv.transpose() * l_inv;
  cov = 0.5 * (cov + cov.transpose());

  return LaplaceResult{
      GaussianDistribution(mode.mode, cov),
      mode.model_evals + hessian_evals(d),
      mode.iterations,
      mode.final_grad_norm,
  };
}

}  // namespace camfis
