#include <doctest.h>

#include <cmath>
#include <vector>

#include "camfis/error.hpp"
#include "camfis/random.hpp"
#include "camfis/tradeoff.hpp"

using namespace camfis;

TEST_CASE("error model fit recovers exact constants") {
  const std::vector<FidelityPoint> pts{{1.0, 2.0 * std::exp(1.0)}, {1e-9, 2.0}};
  const ErrorModel em = fit_error_model(pts);
  CHECK(em.k0_tilde == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(em.k1 == doctest::Approx(1.0).epsilon(1e-6));
  for (const auto& p : pts) CHECK(em.predict(p.h) == doctest::Approx(p.value).epsilon(1e-9));
}

TEST_CASE("error model fit on noisy synthetic data") {
  RandomStream rng(3);
  std::vector<FidelityPoint> pts;
  for (int n : {8, 16, 24, 32, 40, 48, 56, 64}) {
    const double h = 1.0 / n;
    pts.push_back({h, 3.0 * std::exp(5.0 * h * h) * (1.0 + 0.01 * rng.normal())});
  }
  const ErrorModel em = fit_error_model(pts);
  CHECK(std::abs(em.k0_tilde / 3.0 - 1.0) < 0.05);
  CHECK(std::abs(em.k1 / 5.0 - 1.0) < 0.05);
}

TEST_CASE("error model on a plateau and bad inputs") {
  const std::vector<FidelityPoint> flat{{0.5, 1.7}, {0.25, 1.7}, {0.125, 1.7}};
  const ErrorModel em = fit_error_model(flat);
  CHECK(std::abs(em.k1) < 1e-12);
  CHECK(em.k0_tilde == doctest::Approx(1.7).epsilon(1e-12));
  const std::vector<FidelityPoint> one{{0.5, 2.0}, {0.5, 3.0}};
  CHECK_THROWS(fit_error_model(one));
  const std::vector<FidelityPoint> neg{{0.5, 2.0}, {0.25, -1.0}};
  CHECK_THROWS(fit_error_model(neg));
}

TEST_CASE("exponential delta form") {
  ErrorModel em;
  em.form = DeltaForm::exponential;
  em.rate = 2.0;
  CHECK(em.delta(0.5) == doctest::Approx(0.25));
  em.form = DeltaForm::polynomial;
  CHECK(em.delta(0.5) == doctest::Approx(0.25));
}

TEST_CASE("cost model fit") {
  const std::vector<FidelityPoint> exact{{0.5, 0.1 + 2.0 * 2}, {0.25, 0.1 + 2.0 * 4}};
  const CostFit cf = fit_cost_model(exact);
  CHECK(cf.c0 == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(cf.c1 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_FALSE(cf.clamped);

  RandomStream rng(5);
  std::vector<FidelityPoint> noisy;
  for (int n : {8, 16, 32, 64, 128, 256}) noisy.push_back({1.0 / n, (0.3 + 0.01 * n) * (1.0 + 0.05 * rng.normal())});
  const CostFit nf = fit_cost_model(noisy);
  CHECK(std::abs(nf.c1 / 0.01 - 1.0) < 0.15);

  const std::vector<FidelityPoint> flat{{0.5, 1.0}, {0.25, 1.0}, {0.125, 1.0}};
  CHECK(std::abs(fit_cost_model(flat).c1) < 1e-12);

  // negative intercept is clamped and the slope refit through the origin
  const std::vector<FidelityPoint> steep{{0.5, 0.5}, {0.25, 3.0}};
  const CostFit clamped = fit_cost_model(steep);
  CHECK(clamped.clamped);
  CHECK(clamped.c0 == 0.0);
  CHECK(clamped.c1 == doctest::Approx((2 * 0.5 + 4 * 3.0) / (4.0 + 16.0)));

  const std::vector<FidelityPoint> degenerate{{0.5, 1.0}, {0.5, 2.0}};
  CHECK_THROWS(fit_cost_model(degenerate));
}

TEST_CASE("required samples") {
  ErrorModel em;
  em.k0_tilde = 1.0;
  em.k1 = 0.0;
  CHECK(required_samples(em, 0.1, 0.01) == 100);
  CHECK(required_samples(em, 0.1, 1.0) == 1);
  em.k0_tilde = 2.0;
  em.k1 = 1.0;
  CHECK(required_samples(em, 0.5, 0.1) == 26);  // ceil(20 e^0.25)
  CHECK(required_samples(em, 0.5, 0.1, 4.0) == static_cast<std::uint64_t>(std::ceil(80 * std::exp(0.25))));
  em.k1 = 1e6;
  CHECK_THROWS(required_samples(em, 1.0, 1e-3));
  for (double h : {0.5, 0.1, 0.01}) {
    em.k1 = 3.0;
    CHECK(static_cast<double>(required_samples(em, h, 0.01)) * 0.01 >= em.k0_tilde);
  }
}

TEST_CASE("two-candidate tradeoff") {
  ErrorModel em;
  em.k0_tilde = 2.0;
  em.k1 = 1.0;
  CostModel cm;
  cm.c0 = 0.0;
  cm.c1 = 1.0;
  cm.high_fidelity_cost = 1.0;
  cm.training_evals = 10;
  CHECK(tradeoff_objective(0.5, em, cm, 0.1) == doctest::Approx(20 * std::exp(0.25) + 20));
  CHECK(tradeoff_objective(0.25, em, cm, 0.1) == doctest::Approx(20 * std::exp(0.0625) + 40));
  const std::vector<double> cands{0.5, 0.25};
  const TradeoffSolution s = solve_tradeoff(cands, em, cm, 0.1);
  CHECK(s.h_star == 0.5);
  CHECK(s.m_star == 26);
  CHECK(s.predicted_cost == doctest::Approx(45.68).epsilon(1e-3));

  const std::vector<double> single{0.125};
  CHECK(solve_tradeoff(single, em, cm, 0.1).h_star == 0.125);
  // loose tolerance: training cost dominates, the coarsest model wins
  const std::vector<double> many{0.5, 0.25, 0.125, 1.0 / 16};
  CHECK(solve_tradeoff(many, em, cm, 1e6).h_star == 0.5);
}

TEST_CASE("tradeoff is exhaustive and ties go to the larger h") {
  ErrorModel em;
  em.k0_tilde = 1.3;
  em.k1 = 40.0;
  CostModel cm;
  cm.c0 = 1e-6;
  cm.c1 = 1e-7;
  cm.high_fidelity_cost = 1e-5;
  cm.training_evals = 900;
  std::vector<double> cands;
  for (int n = 8; n <= 64; n += 4) cands.push_back(1.0 / n);
  for (double eps : {10.0, 1.0, 0.1, 0.01, 0.001}) {
    const TradeoffSolution s = solve_tradeoff(cands, em, cm, eps);
    for (double h : cands) CHECK(tradeoff_objective(s.h_star, em, cm, eps) <= tradeoff_objective(h, em, cm, eps));
  }
  em.k1 = 0.0;
  cm.c0 = 1.0;
  cm.c1 = 0.0;
  const std::vector<double> tie{0.25, 0.5};
  CHECK(solve_tradeoff(tie, em, cm, 0.1).h_star == 0.5);
}

TEST_CASE("cost bounds") {
  CHECK(cost_bound_exponential(std::exp(1.0), std::exp(1.0), 0.01, 1, 1, 1, 1) ==
        doctest::Approx(100 * std::exp(0.1) + 10).epsilon(1e-12));
  CHECK(cost_bound_polynomial(2, 1, 1e-3, 1, 1, 1, 1) ==
        doctest::Approx(1000 * std::exp(0.01) + 10).epsilon(1e-12));
  CHECK(cost_bound_exponential(2, 3, 1.0, 5, 7, 2, 0) == doctest::Approx(17.0));
  CHECK(cost_bound_polynomial(2, 3, 1.0, 5, 7, 2, 0) == doctest::Approx(17.0));
  CHECK(cost_bound_exponential(2, 3, 0.01, 1, 1, 1, 1) > cost_bound_exponential(2, 3, 0.1, 1, 1, 1, 1));
  for (double eps : {1.0, 0.3, 1e-2, 1e-5}) CHECK(cost_bound_polynomial(1.5, 0.7, eps, 2, 3, 4, 1) >= 2 * 4 / eps);

  CHECK_THROWS(cost_bound_exponential(1.0, 2.0, 0.1, 1, 1, 1, 1));
  CHECK_THROWS(cost_bound_exponential(2.0, 2.0, 1.5, 1, 1, 1, 1));
  CHECK_THROWS(cost_bound_polynomial(0.0, 1.0, 0.1, 1, 1, 1, 1));
  CHECK_THROWS(cost_bound_polynomial(1.0, 1.0, 0.0, 1, 1, 1, 1));
}

TEST_CASE("speedup limit") {
  CHECK(speedup_limit(3.0, 0.0) == 1.0);
  CHECK(speedup_limit(2.0, 0.5) == doctest::Approx(std::exp(1.0)));
  CHECK(speedup_limit(0.1, 0.2) > 1.0);
}
