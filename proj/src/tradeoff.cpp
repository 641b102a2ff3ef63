#include "camfis/tradeoff.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <set>

#include "camfis/error.hpp"

namespace camfis {

double ErrorModel::delta(double h) const {
  switch (form) {
    case DeltaForm::polynomial:
      return std::pow(h, rate);
    case DeltaForm::exponential:
      return std::pow(rate, -1.0 / h);
  }
  return 0.0;
}

double ErrorModel::predict(double h) const { return k0_tilde * std::exp(k1 * delta(h)); }

namespace {

struct LineFit {
  double intercept;
  double slope;
};

// Ordinary least squares y = a + b x.
LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error("least squares: degenerate design (all abscissae equal)");
  const double b = sxy / sxx;
  return {my - b * mx, b};
}

}  // namespace

ErrorModel fit_error_model(std::span<const FidelityPoint> points, DeltaForm form, double rate) {
  ErrorModel em;
  em.form = form;
  em.rate = rate;
  std::vector<double> x, y;
  std::set<double> distinct;
  for (const auto& p : points) {
    if (!(p.h > 0.0)) throw Error("fit_error_model: fidelity must be positive");
    if (!(p.value >= 1.0) || !std::isfinite(p.value)) throw Error("fit_error_model: chi2+1 values must be >= 1");
    x.push_back(em.delta(p.h));
    y.push_back(std::log(p.value));
    distinct.insert(x.back());
  }
  if (distinct.size() < 2) throw Error("fit_error_model: need at least two distinct delta(h) values");
  const LineFit fit = least_squares_line(x, y);
  em.k0_tilde = std::exp(fit.intercept);
  em.k1 = fit.slope;
  return em;
}

CostFit fit_cost_model(std::span<const FidelityPoint> points) {
  std::vector<double> x, y;
  std::set<double> distinct;
  for (const auto& p : points) {
    if (!(p.h > 0.0)) throw Error("fit_cost_model: fidelity must be positive");
    if (!(p.value >= 0.0)) throw Error("fit_cost_model: timings must be nonnegative");
    x.push_back(1.0 / p.h);
    y.push_back(p.value);
    distinct.insert(p.h);
  }
  if (distinct.size() < 2) throw Error("fit_cost_model: need at least two distinct fidelities");
  const LineFit fit = least_squares_line(x, y);
  CostFit out{fit.intercept, fit.slope, false};
  if (out.c0 < 0.0) {
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += x[i] * y[i];
      sxx += x[i] * x[i];
    }
    out = {0.0, sxy / sxx, true};
    std::cerr << "warning: fitted cost intercept c0 was negative; clamped to 0\n";
  }
  if (out.c1 < 0.0) out.c1 = 0.0;
  return out;
}

double required_samples_real(const ErrorModel& em, double h, double epsilon, double f_sup_factor) {
  if (!(epsilon > 0.0)) throw Error("required_samples: epsilon must be positive");
  return f_sup_factor * (em.k0_tilde / epsilon) * std::exp(em.k1 * em.delta(h));
}

std::uint64_t required_samples(const ErrorModel& em, double h, double epsilon, double f_sup_factor) {
  const double m = std::ceil(required_samples_real(em, h, epsilon, f_sup_factor));
  if (!std::isfinite(m) || m >= 9.0e18) {
    throw Error("required_samples: sample count overflows (h outside the fitted range?)");
  }
  return m < 1.0 ? 1 : static_cast<std::uint64_t>(m);
}

double tradeoff_objective(double h, const ErrorModel& em, const CostModel& cm, double epsilon,
                          double f_sup_factor) {
  return required_samples_real(em, h, epsilon, f_sup_factor) * cm.high_fidelity_cost +
         static_cast<double>(cm.training_evals) * cm.surrogate_cost(h);
}

TradeoffSolution solve_tradeoff(std::span<const double> candidates, const ErrorModel& em, const CostModel& cm,
                                double epsilon, double f_sup_factor) {
  if (candidates.empty()) throw Error("solve_tradeoff: empty candidate list");
  double best_h = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (double h : candidates) {
    const double obj = tradeoff_objective(h, em, cm, epsilon, f_sup_factor);
    if (obj < best || (obj == best && h > best_h)) {
      best = obj;
      best_h = h;
    }
  }
  if (!std::isfinite(best)) throw Error("solve_tradeoff: objective is infinite at every candidate");
  return {best_h, required_samples(em, best_h, epsilon, f_sup_factor), best, em.predict(best_h)};
}

namespace {

void check_bound_args(double alpha, double beta, double epsilon) {
  if (!(alpha > 1.0) || !(beta > 1.0)) throw Error("cost bound: alpha and beta must exceed 1");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error("cost bound: epsilon must lie in (0, 1]");
}

}  // namespace

double cost_bound_exponential(double alpha, double beta, double epsilon, double high_fidelity_cost,
                              double training_evals, double k0_prime, double k1) {
  check_bound_args(alpha, beta, epsilon);
  const double log_alpha_beta = std::log(beta) / std::log(alpha);
  const double log_beta_alpha = std::log(alpha) / std::log(beta);
  return high_fidelity_cost * k0_prime / epsilon * std::exp(k1 * std::pow(epsilon, 1.0 / (1.0 + log_alpha_beta))) +
         training_evals * std::pow(epsilon, -1.0 / (1.0 + log_beta_alpha));
}

double cost_bound_polynomial(double alpha, double beta, double epsilon, double high_fidelity_cost,
                             double training_evals, double k0_prime, double k1) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw Error("cost bound: alpha and beta must be positive");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error("cost bound: epsilon must lie in (0, 1]");
  return high_fidelity_cost * k0_prime / epsilon * std::exp(k1 * std::pow(epsilon, alpha / (alpha + beta))) +
         training_evals * std::pow(epsilon, -beta / (alpha + beta));
}

double speedup_limit(double k1, double delta_at_hbar) { return std::exp(k1 * delta_at_hbar); }

}  // namespace camfis
