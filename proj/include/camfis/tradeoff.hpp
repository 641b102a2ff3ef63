#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace camfis {

/// Rate of the surrogate error delta(h).
enum class DeltaForm {
  polynomial,   // delta(h) = h^rate
  exponential,  // delta(h) = rate^(-1/h)
};

/// Fitted chi^2 model: chi^2(p || q_h) + 1 ~= k0_tilde * exp(k1 * delta(h)).
struct ErrorModel {
  double k0_tilde = 1.0;
  double k1 = 0.0;
  DeltaForm form = DeltaForm::polynomial;
  double rate = 2.0;

  double delta(double h) const;
  double predict(double h) const;
};

/// Surrogate cost c(h) = c0 + c1 / h, high-fidelity cost C per evaluation
/// and M training evaluations per Laplace fit. Costs are in seconds.
struct CostModel {
  double c0 = 0.0;
  double c1 = 0.0;
  double high_fidelity_cost = 1.0;  // C
  std::uint64_t training_evals = 0;  // M

  double surrogate_cost(double h) const { return c0 + c1 / h; }
};

struct TradeoffSolution {
  double h_star = 0.0;
  std::uint64_t m_star = 0;
  double predicted_cost = 0.0;  // objective at h_star (real-valued sample count)
  double predicted_chi2_plus_one = 0.0;
};

struct FidelityPoint {
  double h;
  double value;
};

/// Least squares of log(chi2_plus_one) against delta(h).
ErrorModel fit_error_model(std::span<const FidelityPoint> points, DeltaForm form = DeltaForm::polynomial,
                           double rate = 2.0);

struct CostFit {
  double c0 = 0.0;
  double c1 = 0.0;
  bool clamped = false;  // c0 came out negative and was set to zero
};

/// Least squares of seconds against 1/h. A negative intercept is clamped to
/// zero (and c1 refit through the origin) so that c(h) stays admissible.
CostFit fit_cost_model(std::span<const FidelityPoint> points);

/// Real-valued sample count f_sup_factor * (k0_tilde / eps) * exp(k1 delta(h)).
double required_samples_real(const ErrorModel& em, double h, double epsilon, double f_sup_factor = 1.0);

/// Ceiling of required_samples_real. Throws on overflow (h far outside the
/// fitted range).
std::uint64_t required_samples(const ErrorModel& em, double h, double epsilon, double f_sup_factor = 1.0);

/// m(h) C + M c(h) at real-valued m(h).
double tradeoff_objective(double h, const ErrorModel& em, const CostModel& cm, double epsilon,
                          double f_sup_factor = 1.0);

/// Brute-force minimization of tradeoff_objective over the candidates. Ties
/// go to the larger h (cheaper surrogate).
TradeoffSolution solve_tradeoff(std::span<const double> candidates, const ErrorModel& em, const CostModel& cm,
                                double epsilon, double f_sup_factor = 1.0);

/// Cost bound when c(h) = beta^(1/h) and delta(h) = alpha^(-1/h):
/// (C K0' / eps) exp(K1 eps^(1/(1 + log_alpha beta))) + M eps^(-1/(1 + log_beta alpha)).
double cost_bound_exponential(double alpha, double beta, double epsilon, double high_fidelity_cost,
                              double training_evals, double k0_prime, double k1);

/// Cost bound when c(h) = h^-beta and delta(h) = h^alpha:
/// (C K0' / eps) exp(K1 eps^(alpha/(alpha+beta))) + M eps^(-beta/(alpha+beta)).
double cost_bound_polynomial(double alpha, double beta, double epsilon, double high_fidelity_cost,
                             double training_evals, double k0_prime, double k1);

/// Limit of fixed-fidelity over context-aware cost bounds as eps -> 0: exp(K1 delta(h_bar)).
double speedup_limit(double k1, double delta_at_hbar);

}  // namespace camfis
