#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "camfis/importance_sampling.hpp"
#include "camfis/harness/harness.hpp"

using namespace camfis;
using namespace camfis::harness;

namespace {

CampaignConfig tiny_heat() {
  CampaignConfig c = default_config(ProblemKind::heat, Scale::desk);
  c.fidelities = {8, 16, 32};
  c.high_fidelity = 64;
  c.pilot_m = 200;
  c.pilot_trials = 8;
  c.truth_m = 2000;
  c.truth_trials = 4;
  c.mse_trials = 20;
  c.tolerances = {1.0, 0.1};
  c.timing_evals = 20;
  c.timing_repeats = 2;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("parallel_for covers every index and propagates errors") {
  for (std::size_t threads : {1u, 3u, 0u}) {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, 2, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("experiment data depend only on the master seed") {
  const CampaignConfig cfg = tiny_heat();
  CHECK(make_experiment(cfg, 3).problem.data == make_experiment(cfg, 3).problem.data);
  CHECK(make_experiment(cfg, 3).problem.data != make_experiment(cfg, 4).problem.data);
}

TEST_CASE("pilot report") {
  CampaignConfig cfg = tiny_heat();
  const Experiment exp = make_experiment(cfg, 1);
  const PilotReport r = run_pilot(exp, stage_stream(RandomStream(1), Stage::pilot));
  REQUIRE(r.rows.size() == 3);
  std::uint64_t max_evals = 0;
  for (const auto& row : r.rows) {
    CHECK(row.chi2_mean >= 1.0);
    CHECK(row.fit_seconds > 0.0);
    CHECK(row.eval_seconds > 0.0);
    CHECK(row.h == 1.0 / row.n);
    max_evals = std::max(max_evals, row.laplace_evals);
  }
  CHECK(r.cost_model.training_evals == max_evals);
  CHECK(r.cost_model.high_fidelity_cost > 0.0);
  CHECK(r.cost_model.c0 >= 0.0);
  CHECK(r.error_model.k0_tilde > 0.0);

  // chi^2 columns do not depend on the worker count
  cfg.threads = 3;
  const Experiment exp3 = make_experiment(cfg, 1);
  const PilotReport r3 = run_pilot(exp3, stage_stream(RandomStream(1), Stage::pilot));
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(r3.rows[i].chi2_mean == r.rows[i].chi2_mean);
    CHECK(r3.rows[i].laplace_evals == r.rows[i].laplace_evals);
  }

  // pinned costs replace the timed ones
  cfg.pinned_costs = PinnedCosts{1e-7, 2e-8, 3e-6};
  PilotReport pinned = r;
  fit_pilot_models(pinned, cfg);
  CHECK(pinned.cost_model.c1 == 2e-8);
  CHECK(pinned.cost_model.high_fidelity_cost == 3e-6);
  CHECK(pinned.error_model.k1 == r.error_model.k1);
}

TEST_CASE("error model fitted to a synthetic chi2 curve") {
  // p = N(0, 1), q_h = N(a h, 1): chi^2 + 1 = exp(a^2 h^2).
  const double a = 6.0;
  const GaussianDistribution p = GaussianDistribution::isotropic(Vector::Zero(1), 1.0);
  const PotentialDensity target = gaussian_potential(p);
  auto quadrature = [&](double mu) {
    const int n = 40000;
    const double lo = -30.0, hi = 30.0, dx = (hi - lo) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double x = lo + i * dx;
      const double w = (i == 0 || i == n) ? 0.5 : 1.0;
      s += w * std::exp(-x * x + 0.5 * (x - mu) * (x - mu)) / std::sqrt(2.0 * std::numbers::pi);
    }
    return s * dx;
  };
  std::vector<FidelityPoint> pts;
  const std::vector<double> hs{1.0 / 8, 1.0 / 12, 1.0 / 16, 1.0 / 24, 1.0 / 32};
  for (double h : hs) {
    const GaussianDistribution q = GaussianDistribution::isotropic(Vector::Constant(1, a * h), 1.0);
    double mean = 0.0;
    for (std::uint64_t t = 0; t < 50; ++t) {
      RandomStream s = RandomStream(17).derive(t).derive(static_cast<std::uint64_t>(1.0 / h));
      mean += chi2_estimate(target, q, 2000, s).value_plus_one;
    }
    pts.push_back({h, mean / 50});
  }
  const ErrorModel em = fit_error_model(pts);
  for (double h : hs) {
    const double exact = quadrature(a * h);
    CHECK(exact == doctest::Approx(std::exp(a * a * h * h)).epsilon(1e-8));
    CHECK(std::abs(em.predict(h) / exact - 1.0) < 0.10);
  }
}

TEST_CASE("campaign pieces on a small heat problem") {
  const CampaignConfig cfg = tiny_heat();
  const Experiment exp = make_experiment(cfg, 2);
  const RandomStream master(2);
  const PilotReport pilot = run_pilot(exp, stage_stream(master, Stage::pilot));

  SUBCASE("context-aware run at a loose tolerance") {
    const Algorithm1Result r = run_algorithm1(exp, pilot, 10.0, stage_stream(master, Stage::run));
    const double h = r.solution.h_star;
    CHECK(r.solution.m_star <= std::ceil(pilot.error_model.k0_tilde * std::exp(pilot.error_model.k1 * h * h) / 10.0));
    CHECK(r.estimate >= -1.0);
    CHECK(r.estimate <= 1.0);
    CHECK(r.n_star == static_cast<int>(std::lround(1.0 / h)));
    const Algorithm1Result again = run_algorithm1(exp, pilot, 10.0, stage_stream(master, Stage::run));
    CHECK(again.estimate == r.estimate);
    CHECK(again.solution.m_star == r.solution.m_star);
  }

  SUBCASE("truth estimate") {
    FitCache fits(exp);
    const LaplaceResult& hf = fits.get(cfg.high_fidelity).laplace;
    const TestFunction f = make_test_function(hf);
    const TruthEstimate one = estimate_truth(exp, hf, f, 500, 1, RandomStream(9));
    RandomStream direct = RandomStream(9).derive(0);
    CHECK(one.mean == mfis_estimate(f, make_potential(exp.problem, cfg.high_fidelity), hf.approximation, 500, direct));

    const TruthEstimate many = estimate_truth(exp, hf, f, 1000, 60, RandomStream(10));
    RandomStream cs(11);
    const double chi2 = chi2_estimate(make_potential(exp.problem, cfg.high_fidelity), hf.approximation, 20000, cs)
                            .value_plus_one;
    const double rms_bound = std::sqrt(mse_bound(1.0, 1000, chi2));
    CHECK(rms_bound / many.std_dev >= 1.0);
    CHECK(rms_bound / many.std_dev <= 4.0);
  }

  SUBCASE("single-sample estimator") {
    FitCache fits(exp);
    const TestFunction f = make_test_function(fits.get(cfg.high_fidelity).laplace);
    const ExperimentRecord r = measure_mse(exp, pilot, 1e6, Estimator::high_fidelity_alone, f, 0.0, 400, fits,
                                           RandomStream(12));
    CHECK(r.m == 1);
    CHECK(r.mse_hat == 1.0);  // (+-1 - 0)^2
    CHECK(r.n == cfg.high_fidelity);
  }

  SUBCASE("estimator comparison") {
    const Comparison cmp = compare_estimators(exp, pilot, cfg.tolerances, master);
    REQUIRE(cmp.records.size() == 3 * cfg.tolerances.size());
    CHECK(cmp.tradeoffs.size() == cfg.tolerances.size());
    for (std::size_t t = 0; t < cfg.tolerances.size(); ++t) {
      const ExperimentRecord& ca = cmp.records[3 * t];
      const ExperimentRecord& hf = cmp.records[3 * t + 1];
      const ExperimentRecord& sa = cmp.records[3 * t + 2];
      CHECK(ca.estimator == Estimator::context_aware);
      CHECK(hf.estimator == Estimator::high_fidelity_alone);
      CHECK(sa.estimator == Estimator::surrogate_alone);
      CHECK(sa.n == 8);
      CHECK(hf.n == cfg.high_fidelity);
      for (const auto* r : {&ca, &hf, &sa}) {
        CHECK(r->truth == cmp.truth.mean);
        CHECK(r->mse_hat >= 0.0);
        CHECK(r->m >= 1);
        CHECK(r->n_trials == cfg.mse_trials);
        CHECK(r->seed == 2u);
      }
      if (ca.n != cfg.high_fidelity) CHECK(ca.predicted_cost < hf.predicted_cost);
      // loose tolerance: all three stay below the tolerance with slack
      if (cfg.tolerances[t] >= 1.0)
        for (const auto* r : {&ca, &hf, &sa}) CHECK(r->mse_hat <= 1.5 * cfg.tolerances[t]);
    }
    const Comparison again = compare_estimators(exp, pilot, cfg.tolerances, master);
    for (std::size_t i = 0; i < cmp.records.size(); ++i) {
      CHECK(again.records[i].mse_hat == cmp.records[i].mse_hat);
      CHECK(again.records[i].m == cmp.records[i].m);
    }
  }
}

TEST_CASE("estimator names") {
  for (Estimator e : {Estimator::context_aware, Estimator::high_fidelity_alone, Estimator::surrogate_alone})
    CHECK(parse_estimator(to_string(e)) == e);
}
