#include "camfis/harness/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iostream>
#include <limits>
#include <optional>
#include <thread>

#include "camfis/error.hpp"
#include "camfis/importance_sampling.hpp"

namespace camfis::harness {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ParameterVector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

Experiment make_experiment(const CampaignConfig& config, std::uint64_t master_seed) {
  config.validate();
  InverseProblemSpec spec;
  spec.hierarchy.kind = config.problem;
  spec.hierarchy.fidelities = config.fidelities;
  spec.hierarchy.high_fidelity = config.high_fidelity;
  spec.theta_truth = to_vector(config.theta_truth);
  spec.noise_variance = config.noise_variance;
  spec.prior_mean = to_vector(config.prior_mean);
  spec.prior_variance = config.prior_variance;
  RandomStream data_rng = stage_stream(RandomStream(master_seed), Stage::data);
  return Experiment{config, make_inverse_problem(spec, data_rng), master_seed};
}

TimedFit timed_laplace_fit(const Experiment& exp, int n) {
  const PotentialDensity phi = make_potential(exp.problem, n);
  const auto t0 = Clock::now();
  LaplaceResult lap = laplace_approximation(phi, exp.problem.prior.mean(), exp.config.newton);
  return TimedFit{std::move(lap), seconds_since(t0)};
}

const TimedFit& FitCache::get(int n) {
  std::lock_guard lock(mutex_);
  auto& slot = fits_[n];
  if (!slot) slot = std::make_unique<TimedFit>(timed_laplace_fit(*exp_, n));
  return *slot;
}

double measure_eval_seconds(const Experiment& exp, int n, const RandomStream& rng) {
  const PotentialDensity phi = make_potential(exp.problem, n);
  RandomStream s = rng;
  const std::vector<ParameterVector> points = exp.problem.prior.sample(s, exp.config.timing_evals);
  double best = std::numeric_limits<double>::infinity();
  volatile double sink = 0.0;
  for (std::size_t r = 0; r < exp.config.timing_repeats; ++r) {
    const auto t0 = Clock::now();
    double acc = 0.0;
    for (const auto& x : points) acc += phi(x);
    best = std::min(best, seconds_since(t0));
    sink = sink + acc;
  }
  return best / static_cast<double>(points.size());
}

std::vector<double> candidate_h(const CampaignConfig& config) {
  std::vector<double> out;
  for (int n : config.fidelities) out.push_back(SurrogateHierarchy::h_of(n));
  return out;
}

void fit_pilot_models(PilotReport& report, const CampaignConfig& config) {
  std::vector<FidelityPoint> chi2_points, cost_points;
  std::uint64_t max_evals = 0;
  for (const auto& row : report.rows) {
    chi2_points.push_back({row.h, row.chi2_mean});
    cost_points.push_back({row.h, row.eval_seconds});
    max_evals = std::max(max_evals, row.laplace_evals);
  }
  report.error_model = fit_error_model(chi2_points, DeltaForm::polynomial, 2.0);
  report.cost_model.training_evals = max_evals;
  if (config.pinned_costs) {
    report.cost_model.c0 = config.pinned_costs->c0;
    report.cost_model.c1 = config.pinned_costs->c1;
    report.cost_model.high_fidelity_cost = config.pinned_costs->high_fidelity_cost;
  } else {
    const CostFit cf = fit_cost_model(cost_points);
    report.cost_model.c0 = cf.c0;
    report.cost_model.c1 = cf.c1;
  }
}

PilotReport run_pilot(const Experiment& exp, const RandomStream& rng) {
  const CampaignConfig& cfg = exp.config;
  const PotentialDensity target = make_potential(exp.problem, cfg.high_fidelity);
  const RandomStream timing = stage_stream(RandomStream(exp.seed), Stage::timing);

  PilotReport report;
  for (int n : cfg.fidelities) {
    std::optional<TimedFit> fit_or;
    try {
      fit_or = timed_laplace_fit(exp, n);
    } catch (const Error& e) {
      std::cerr << "warning: dropping fidelity n=" << n << " from the pilot: " << e.what() << '\n';
      continue;
    }
    const TimedFit& fit = *fit_or;
    std::vector<double> chi2(cfg.pilot_trials);
    const RandomStream fid_rng = rng.derive(static_cast<std::uint64_t>(n));
    parallel_for(cfg.pilot_trials, cfg.threads, [&](std::size_t i) {
      RandomStream s = fid_rng.derive(i);
      chi2[i] = chi2_estimate(target, fit.laplace.approximation, cfg.pilot_m, s, SurrogateHierarchy::h_of(n))
                    .value_plus_one;
    });
    PilotRow row;
    row.n = n;
    row.h = SurrogateHierarchy::h_of(n);
    row.chi2_mean = mean_of(chi2);
    row.chi2_std = std_of(chi2);
    row.laplace_evals = fit.laplace.model_evals;
    row.fit_seconds = fit.seconds;
    row.eval_seconds = measure_eval_seconds(exp, n, timing.derive(static_cast<std::uint64_t>(n)));
    report.rows.push_back(row);
  }
  if (report.rows.size() < 2) throw Error("run_pilot: fewer than two fidelities survived");
  report.cost_model.high_fidelity_cost =
      measure_eval_seconds(exp, cfg.high_fidelity, timing.derive(static_cast<std::uint64_t>(cfg.high_fidelity)));
  fit_pilot_models(report, cfg);
  return report;
}

namespace {

std::vector<double> pilot_candidates(const PilotReport& pilot) {
  std::vector<double> h;
  for (const auto& row : pilot.rows) h.push_back(row.h);
  return h;
}

int resolution_of(double h) { return static_cast<int>(std::lround(1.0 / h)); }

}  // namespace

Algorithm1Result run_algorithm1(const Experiment& exp, const PilotReport& pilot, double epsilon,
                                const RandomStream& rng, const TestFunction* frozen) {
  const auto t0 = Clock::now();
  Algorithm1Result out;
  const std::vector<double> cands = pilot_candidates(pilot);
  out.solution = solve_tradeoff(cands, pilot.error_model, pilot.cost_model, epsilon, exp.config.f_sup_factor);
  out.n_star = resolution_of(out.solution.h_star);

  const TimedFit fit = timed_laplace_fit(exp, out.n_star);
  out.fit_seconds = fit.seconds;
  out.laplace = fit.laplace;
  out.test_function = frozen != nullptr ? *frozen : make_test_function(fit.laplace);

  const PotentialDensity target = make_potential(exp.problem, exp.config.high_fidelity);
  RandomStream s = rng;
  const auto t1 = Clock::now();
  out.estimate = mfis_estimate(out.test_function, target, fit.laplace.approximation, out.solution.m_star, s);
  out.sample_seconds = seconds_since(t1);
  out.wall_seconds = seconds_since(t0);
  return out;
}

TruthEstimate estimate_truth(const Experiment& exp, const LaplaceResult& high_fidelity_fit, const TestFunction& f,
                             std::size_t n_samples, std::size_t n_trials, const RandomStream& rng) {
  if (n_samples < 1 || n_trials < 1) throw Error("estimate_truth: need at least one sample and one trial");
  const PotentialDensity target = make_potential(exp.problem, exp.config.high_fidelity);
  TruthEstimate t;
  t.runs.resize(n_trials);
  parallel_for(n_trials, exp.config.threads, [&](std::size_t i) {
    RandomStream s = rng.derive(i);
    t.runs[i] = mfis_estimate(f, target, high_fidelity_fit.approximation, n_samples, s);
  });
  t.mean = mean_of(t.runs);
  t.std_dev = std_of(t.runs);
  return t;
}

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::context_aware:
      return "context-aware";
    case Estimator::high_fidelity_alone:
      return "high-fidelity-alone";
    case Estimator::surrogate_alone:
      return "surrogate-alone";
  }
  return "?";
}

Estimator parse_estimator(std::string_view name) {
  if (name == "context-aware") return Estimator::context_aware;
  if (name == "high-fidelity-alone") return Estimator::high_fidelity_alone;
  if (name == "surrogate-alone") return Estimator::surrogate_alone;
  throw Error("unknown estimator tag '" + std::string(name) + "'");
}

ExperimentRecord measure_mse(const Experiment& exp, const PilotReport& pilot, double epsilon, Estimator estimator,
                             const TestFunction& f, double truth, std::size_t n_trials, FitCache& fits,
                             const RandomStream& rng) {
  const CampaignConfig& cfg = exp.config;
  ExperimentRecord rec;
  rec.epsilon = epsilon;
  rec.estimator = estimator;
  rec.truth = truth;
  rec.n_trials = n_trials;
  rec.seed = exp.seed;

  switch (estimator) {
    case Estimator::context_aware: {
      const TradeoffSolution sol =
          solve_tradeoff(pilot_candidates(pilot), pilot.error_model, pilot.cost_model, epsilon, cfg.f_sup_factor);
      rec.n = resolution_of(sol.h_star);
      rec.m = sol.m_star;
      break;
    }
    case Estimator::high_fidelity_alone:
      rec.n = cfg.high_fidelity;
      rec.m = required_samples(pilot.error_model, SurrogateHierarchy::h_of(rec.n), epsilon, cfg.f_sup_factor);
      break;
    case Estimator::surrogate_alone:
      rec.n = cfg.baseline_fidelity != 0 ? cfg.baseline_fidelity
                                         : *std::min_element(cfg.fidelities.begin(), cfg.fidelities.end());
      rec.m = required_samples(pilot.error_model, SurrogateHierarchy::h_of(rec.n), epsilon, cfg.f_sup_factor);
      break;
  }
  const CostModel& cm = pilot.cost_model;
  const double per_eval = rec.n == cfg.high_fidelity ? cm.high_fidelity_cost
                                                     : cm.surrogate_cost(SurrogateHierarchy::h_of(rec.n));
  rec.predicted_cost = static_cast<double>(rec.m) * cm.high_fidelity_cost +
                       static_cast<double>(cm.training_evals) * per_eval;

  const TimedFit& fit = fits.get(rec.n);
  const PotentialDensity target = make_potential(exp.problem, cfg.high_fidelity);
  std::vector<double> sq_err(n_trials), secs(n_trials);
  parallel_for(n_trials, cfg.threads, [&](std::size_t i) {
    RandomStream s = rng.derive(i);
    const auto t0 = Clock::now();
    const double est = mfis_estimate(f, target, fit.laplace.approximation, rec.m, s);
    secs[i] = seconds_since(t0);
    sq_err[i] = (est - truth) * (est - truth);
  });
  rec.mse_hat = mean_of(sq_err);
  rec.mean_cost_seconds = fit.seconds + mean_of(secs);
  return rec;
}

Comparison compare_estimators(const Experiment& exp, const PilotReport& pilot, std::span<const double> tolerances,
                              const RandomStream& master, bool include_baselines) {
  const CampaignConfig& cfg = exp.config;
  FitCache fits(exp);
  const TimedFit& reference = fits.get(cfg.high_fidelity);

  Comparison out;
  out.test_function = make_test_function(reference.laplace);
  out.truth = estimate_truth(exp, reference.laplace, out.test_function, cfg.truth_m, cfg.truth_trials,
                             stage_stream(master, Stage::truth));

  const RandomStream mse_rng = stage_stream(master, Stage::mse);
  const std::vector<double> cands = pilot_candidates(pilot);
  for (std::size_t t = 0; t < tolerances.size(); ++t) {
    const double eps = tolerances[t];
    out.tradeoffs.push_back(solve_tradeoff(cands, pilot.error_model, pilot.cost_model, eps, cfg.f_sup_factor));
    const std::vector<Estimator> kinds =
        include_baselines ? std::vector<Estimator>{Estimator::context_aware, Estimator::high_fidelity_alone,
                                                   Estimator::surrogate_alone}
                          : std::vector<Estimator>{Estimator::context_aware};
    for (Estimator k : kinds) {
      out.records.push_back(measure_mse(exp, pilot, eps, k, out.test_function, out.truth.mean, cfg.mse_trials, fits,
                                        mse_rng.derive(t).derive(static_cast<std::uint64_t>(k))));
    }
  }
  return out;
}

}  // namespace camfis::harness
