#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "camfis/bayes.hpp"
#include "camfis/harness/config.hpp"
#include "camfis/laplace.hpp"
#include "camfis/random.hpp"
#include "camfis/tradeoff.hpp"

namespace camfis::harness {

/// Stage indices for splitting the master seed: stage s, trial i uses
/// master.derive(s).derive(i) (possibly with further per-item splits).
enum class Stage : std::uint64_t { data = 1, pilot = 2, truth = 3, mse = 4, run = 5, timing = 6 };

inline RandomStream stage_stream(const RandomStream& master, Stage s) {
  return master.derive(static_cast<std::uint64_t>(s));
}

/// Config plus the inverse problem with its generated data.
struct Experiment {
  CampaignConfig config;
  InverseProblem problem;
  std::uint64_t seed = 0;
};

/// Validates the config and draws the observation from the data stage of the master seed.
Experiment make_experiment(const CampaignConfig& config, std::uint64_t master_seed);

struct PilotRow {
  int n = 0;
  double h = 0.0;
  double chi2_mean = 0.0;  // mean of the chi^2 + 1 estimates
  double chi2_std = 0.0;
  std::uint64_t laplace_evals = 0;  // M_h
  double fit_seconds = 0.0;
  double eval_seconds = 0.0;  // c(h), seconds per surrogate potential evaluation
};

struct PilotReport {
  std::vector<PilotRow> rows;
  ErrorModel error_model;
  CostModel cost_model;
};

/// Timed Laplace fit at one resolution.
struct TimedFit {
  LaplaceResult laplace;
  double seconds = 0.0;
};

/// Laplace fits keyed by resolution. A fit is deterministic given the
/// resolution and the starting point, so each one is computed and timed once.
class FitCache {
 public:
  explicit FitCache(const Experiment& exp) : exp_(&exp) {}
  const TimedFit& get(int n);

 private:
  const Experiment* exp_;
  std::mutex mutex_;
  std::map<int, std::unique_ptr<TimedFit>> fits_;
};

/// Times one Laplace fit of the posterior at resolution n from the prior mean.
TimedFit timed_laplace_fit(const Experiment& exp, int n);

/// Seconds per evaluation of the posterior potential at resolution n: the
/// fastest of timing_repeats batches of timing_evals evaluations.
double measure_eval_seconds(const Experiment& exp, int n, const RandomStream& rng);

/// Chi^2 trials per fidelity, Laplace fits, timings, then the fitted models.
/// A fidelity whose Laplace fit fails is dropped with a warning.
PilotReport run_pilot(const Experiment& exp, const RandomStream& rng);

/// Error/cost models from existing rows (refits after loading or pinning).
void fit_pilot_models(PilotReport& report, const CampaignConfig& config);

std::vector<double> candidate_h(const CampaignConfig& config);

struct Algorithm1Result {
  double estimate = 0.0;
  TradeoffSolution solution;
  int n_star = 0;
  double fit_seconds = 0.0;
  double sample_seconds = 0.0;
  double wall_seconds = 0.0;
  LaplaceResult laplace;
  TestFunction test_function;
};

/// Solve the trade-off, fit the Laplace approximation at h*, draw m* samples
/// and return the multi-fidelity estimate. Without `frozen` the indicator
/// test function is built from the fit at h*.
Algorithm1Result run_algorithm1(const Experiment& exp, const PilotReport& pilot, double epsilon,
                                const RandomStream& rng, const TestFunction* frozen = nullptr);

struct TruthEstimate {
  double mean = 0.0;
  double std_dev = 0.0;  // across the independent runs
  std::vector<double> runs;
};

/// Average of n_trials multi-fidelity estimates with n_samples each, biased
/// by the high-fidelity Laplace approximation.
TruthEstimate estimate_truth(const Experiment& exp, const LaplaceResult& high_fidelity_fit, const TestFunction& f,
                             std::size_t n_samples, std::size_t n_trials, const RandomStream& rng);

enum class Estimator { context_aware, high_fidelity_alone, surrogate_alone };

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);

struct ExperimentRecord {
  double epsilon = 0.0;
  Estimator estimator = Estimator::context_aware;
  int n = 0;                 // resolution of the biasing fit
  std::uint64_t m = 0;       // samples per trial
  double truth = 0.0;
  double mse_hat = 0.0;
  double mean_cost_seconds = 0.0;  // fit seconds + mean sampling seconds
  double predicted_cost = 0.0;     // modeled m C + M c(h)
  std::size_t n_trials = 0;
  std::uint64_t seed = 0;
};

/// N3 independent estimates of the chosen estimator at tolerance epsilon;
/// mean squared deviation from the truth plus mean wall time.
ExperimentRecord measure_mse(const Experiment& exp, const PilotReport& pilot, double epsilon, Estimator estimator,
                             const TestFunction& f, double truth, std::size_t n_trials, FitCache& fits,
                             const RandomStream& rng);

struct Comparison {
  TruthEstimate truth;
  TestFunction test_function;
  std::vector<TradeoffSolution> tradeoffs;  // one per tolerance
  std::vector<ExperimentRecord> records;    // three per tolerance
};

/// Truth estimate and the three estimators at every tolerance, sharing one
/// test function frozen from the high-fidelity Laplace fit.
Comparison compare_estimators(const Experiment& exp, const PilotReport& pilot, std::span<const double> tolerances,
                              const RandomStream& master, bool include_baselines = true);

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware concurrency).
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace camfis::harness
