#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "camfis/densities.hpp"
#include "camfis/error.hpp"
#include "camfis/importance_sampling.hpp"

using namespace camfis;

namespace {

Vector scalar_vec(double x) { return Vector::Constant(1, x); }

/// Exp(rate) on theta >= 0, sampled by inverse CDF.
struct ExponentialBiasing {
  double rate;
  double log_pdf(const ParameterVector& x) const {
    return x[0] < 0.0 ? -std::numeric_limits<double>::infinity() : std::log(rate) - rate * x[0];
  }
  ParameterVector sample(RandomStream& rng) const { return scalar_vec(-std::log1p(-rng.uniform()) / rate); }
};

PotentialDensity exponential_potential(double rate) {
  return PotentialDensity(
      [rate](const ParameterVector& x) {
        return x[0] < 0.0 ? std::numeric_limits<double>::infinity() : rate * x[0];
      },
      1);
}

/// Trapezoid rule for the integral of exp(g) over [a, b].
template <class G>
double trapezoid_exp(G g, double a, double b, int n) {
  const double dx = (b - a) / n;
  double s = 0.5 * (std::exp(g(a)) + std::exp(g(b)));
  for (int i = 1; i < n; ++i) s += std::exp(g(a + i * dx));
  return s * dx;
}

}  // namespace

TEST_CASE("gaussian chi2 oracle by quadrature") {
  // integral of p^2 / q for p = N(0,1), q = N(0,2)
  const double log2pi = std::log(2.0 * std::numbers::pi);
  auto g = [&](double x) {
    const double lp = -0.5 * x * x - 0.5 * log2pi;
    const double lq = -0.25 * x * x - 0.5 * (log2pi + std::log(2.0));
    return 2.0 * lp - lq;
  };
  const double quad = trapezoid_exp(g, -40.0, 40.0, 200000);
  CHECK(quad == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-10));

  const GaussianDistribution p(scalar_vec(0.0), Matrix::Constant(1, 1, 1.0));
  const GaussianDistribution q(scalar_vec(0.0), Matrix::Constant(1, 1, 2.0));
  RandomStream rng(2024);
  const ChiSquareEstimate est = chi2_estimate(gaussian_potential(p), q, 1000000, rng);
  CHECK(std::abs(est.value_plus_one - quad) < 0.01);
  CHECK(std::abs(est.value_plus_one - quad) < 3.0 * est.std_error);
  CHECK(est.sample_size == 1000000);
}

TEST_CASE("exponential chi2 oracle") {
  const double a = 2.0, b = 1.5;
  const double exact = a * a / (b * (2.0 * a - b));
  auto g = [&](double x) { return 2.0 * (std::log(a) - a * x) - (std::log(b) - b * x); };
  CHECK(trapezoid_exp(g, 0.0, 60.0, 600000) == doctest::Approx(exact).epsilon(1e-8));

  RandomStream rng(7);
  const ChiSquareEstimate est = chi2_estimate(exponential_potential(a), ExponentialBiasing{b}, 1000000, rng);
  CHECK(std::abs(est.value_plus_one - exact) < 3.0 * est.std_error);
}

TEST_CASE("identical target and biasing") {
  const GaussianDistribution g = GaussianDistribution::isotropic(Vector::Zero(3), 0.5);
  RandomStream rng(1);
  CHECK(chi2_estimate(gaussian_potential(g), g, 500, rng).value_plus_one == doctest::Approx(1.0).epsilon(1e-12));

  // Weights are constant, so the estimate is the plain mean of f.
  const auto samples = g.sample(rng, 1000);
  auto f = [](const ParameterVector& x) { return x[0] + x[1] * x[2]; };
  double plain = 0.0;
  for (const auto& x : samples) plain += f(x);
  plain /= static_cast<double>(samples.size());
  const double est = self_normalized_estimate(f, gaussian_potential(g), g, std::span<const ParameterVector>(samples));
  CHECK(std::abs(est - plain) <= 1e-12);
}

TEST_CASE("constant test function gives exactly one") {
  const GaussianDistribution p = GaussianDistribution::isotropic(Vector::Constant(2, 1.0), 0.3);
  const GaussianDistribution q = GaussianDistribution::isotropic(Vector::Zero(2), 2.0);
  RandomStream rng(11);
  CHECK(mfis_estimate([](const ParameterVector&) { return 1.0; }, gaussian_potential(p), q, 777, rng) == 1.0);
}

TEST_CASE("self-normalized mean of a shifted gaussian") {
  // p = N(1,1), q = N(0,2), f(theta) = theta
  const GaussianDistribution p(scalar_vec(1.0), Matrix::Constant(1, 1, 1.0));
  const GaussianDistribution q(scalar_vec(0.0), Matrix::Constant(1, 1, 2.0));
  RandomStream rng(3);
  const double est = mfis_estimate([](const ParameterVector& x) { return x[0]; }, gaussian_potential(p), q, 100000, rng);
  CHECK(std::abs(est - 1.0) < 0.05);
}

TEST_CASE("mfis with target equal to biasing") {
  const GaussianDistribution g = GaussianDistribution::isotropic(Vector::Zero(2), 1.0);
  RandomStream rng(5);
  const PotentialDensity phi = gaussian_potential(g);
  const auto before = phi.eval_count();
  const double est = mfis_estimate([](const ParameterVector& x) { return x.squaredNorm(); }, phi, g, 100000, rng);
  CHECK(std::abs(est - 2.0) < 0.05);
  CHECK(phi.eval_count() - before == 100000);
}

TEST_CASE("single sample returns f of that sample") {
  const GaussianDistribution p = GaussianDistribution::isotropic(Vector::Zero(1), 1.0);
  const GaussianDistribution q = GaussianDistribution::isotropic(Vector::Constant(1, 3.0), 1.0);
  RandomStream a(8), b(8);
  const double est = mfis_estimate([](const ParameterVector& x) { return std::sin(x[0]); }, gaussian_potential(p), q, 1, a);
  CHECK(est == std::sin(q.sample(b)[0]));
}

TEST_CASE("potential shift invariance") {
  const GaussianDistribution p = GaussianDistribution::isotropic(Vector::Zero(2), 1.0);
  const GaussianDistribution q = GaussianDistribution::isotropic(Vector::Constant(2, 0.5), 1.5);
  const PotentialDensity base = gaussian_potential(p);
  const PotentialDensity shifted([&](const ParameterVector& x) { return base(x) + 1234.5; }, 2);
  RandomStream rng(9);
  const auto samples = q.sample(rng, 2000);
  auto f = [](const ParameterVector& x) { return x[0] > 0 ? 1.0 : -1.0; };
  const double e1 = self_normalized_estimate(f, base, q, std::span<const ParameterVector>(samples));
  const double e2 = self_normalized_estimate(f, shifted, q, std::span<const ParameterVector>(samples));
  CHECK(std::abs(e1 - e2) <= 1e-12 * std::max(1.0, std::abs(e1)));
  const auto lw1 = log_weights(base, q, samples);
  const auto lw2 = log_weights(shifted, q, samples);
  const double c1 = chi2_from_log_weights(lw1), c2 = chi2_from_log_weights(lw2);
  CHECK(std::abs(c1 - c2) <= 1e-12 * c1);
}

TEST_CASE("chi2 at least one on random gaussian pairs") {
  RandomStream rng(13);
  for (int k = 0; k < 200; ++k) {
    const double mu = 3.0 * rng.normal();
    const double v1 = 0.1 + 3.0 * rng.uniform(), v2 = 0.1 + 3.0 * rng.uniform();
    const GaussianDistribution p(scalar_vec(mu), Matrix::Constant(1, 1, v1));
    const GaussianDistribution q(scalar_vec(0.0), Matrix::Constant(1, 1, v2));
    RandomStream s = rng.derive(static_cast<std::uint64_t>(k));
    CHECK(chi2_estimate(gaussian_potential(p), q, 50, s).value_plus_one >= 1.0);
  }
}

TEST_CASE("estimate is a convex combination of f values") {
  const GaussianDistribution p = GaussianDistribution::isotropic(Vector::Constant(2, 2.0), 0.2);
  const GaussianDistribution q = GaussianDistribution::isotropic(Vector::Zero(2), 1.0);
  RandomStream rng(17);
  const auto samples = q.sample(rng, 300);
  auto f = [](const ParameterVector& x) { return std::tanh(x[0] - x[1]); };
  double lo = 1e300, hi = -1e300;
  for (const auto& x : samples) {
    lo = std::min(lo, f(x));
    hi = std::max(hi, f(x));
  }
  const double est = self_normalized_estimate(f, gaussian_potential(p), q, std::span<const ParameterVector>(samples));
  CHECK(est >= lo);
  CHECK(est <= hi);
}

TEST_CASE("spread shrinks with the sample size") {
  const GaussianDistribution p(scalar_vec(0.5), Matrix::Constant(1, 1, 1.0));
  const GaussianDistribution q(scalar_vec(0.0), Matrix::Constant(1, 1, 2.0));
  const PotentialDensity phi = gaussian_potential(p);
  auto f = [](const ParameterVector& x) { return x[0]; };
  auto spread = [&](std::size_t m) {
    std::vector<double> v;
    for (std::uint64_t r = 0; r < 50; ++r) {
      RandomStream s = RandomStream(21).derive(m).derive(r);
      v.push_back(mfis_estimate(f, phi, q, m, s));
    }
    double mean = 0, ss = 0;
    for (double x : v) mean += x;
    mean /= 50;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / 49);
  };
  const double ratio = spread(100) / spread(10000);
  CHECK(ratio >= 5.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("degenerate inputs") {
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<double> all_dead{ninf, ninf};
  const std::vector<double> f{1.0, 2.0};
  CHECK_THROWS_AS(self_normalized_mean(f, all_dead), ModelError);
  CHECK_THROWS(chi2_from_log_weights(all_dead));
  CHECK_THROWS(self_normalized_mean(std::span<const double>(), std::span<const double>()));
  const GaussianDistribution q = GaussianDistribution::isotropic(Vector::Zero(1), 1.0);
  RandomStream rng(1);
  CHECK_THROWS(chi2_estimate(gaussian_potential(q), q, 1, rng));
  CHECK_THROWS(mfis_estimate([](const ParameterVector&) { return 1.0; }, gaussian_potential(q), q, 0, rng));

  const PotentialDensity dead([](const ParameterVector&) { return std::numeric_limits<double>::infinity(); }, 1);
  CHECK_THROWS_AS(chi2_estimate(dead, q, 10, rng), ModelError);
}

TEST_CASE("effective sample size and mse bound") {
  CHECK(effective_sample_size(100, 1.0) == 100.0);
  CHECK(effective_sample_size(100, 4.0) == 25.0);
  CHECK(effective_sample_size(1000, 2.0 / std::sqrt(3.0)) == doctest::Approx(866.0254037844386));
  CHECK(mse_bound(1.0, 4, 1.0) == 1.0);
  CHECK(mse_bound(1.0, 400, 1.0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(mse_bound(2.0, 100, 1.5) == doctest::Approx(0.24).epsilon(1e-15));
}
