#include <doctest.h>

#include <cmath>
#include <numbers>

#include "camfis/densities.hpp"
#include "camfis/error.hpp"
#include "camfis/random.hpp"

using namespace camfis;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("log pdf closed forms") {
  const double log2pi = std::log(2.0 * std::numbers::pi);
  const GaussianDistribution std1(vec({0.0}), Matrix::Identity(1, 1));
  CHECK(gaussian_log_pdf(std1, vec({0.0})) == doctest::Approx(-0.5 * log2pi).epsilon(1e-15));
  CHECK(gaussian_log_pdf(std1, vec({1.0})) == doctest::Approx(-0.5 - 0.5 * log2pi).epsilon(1e-15));

  Matrix cov = Matrix::Zero(2, 2);
  cov(0, 0) = 2.0;
  cov(1, 1) = 0.5;
  const GaussianDistribution g(vec({0.0, 0.0}), cov);
  CHECK(g.is_diagonal());
  CHECK(gaussian_log_pdf(g, vec({1.0, 1.0})) == doctest::Approx(-1.25 - log2pi).epsilon(1e-14));
}

TEST_CASE("full and diagonal paths agree") {
  Matrix cov(3, 3);
  cov << 2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 0.5;
  const GaussianDistribution g(vec({1.0, -1.0, 0.5}), cov);
  CHECK_FALSE(g.is_diagonal());
  const Vector x = vec({0.2, 0.4, -0.3});
  const Vector r = x - g.mean();
  CHECK(g.mahalanobis_sq(x) == doctest::Approx(r.dot(cov.inverse() * r)).epsilon(1e-13));
  CHECK((g.factor() * g.factor().transpose() - cov).norm() / cov.norm() < 1e-12);

  const GaussianDistribution d = GaussianDistribution::isotropic(vec({0.0, 0.0, 0.0}), 0.1);
  CHECK(d.mahalanobis_sq_diagonal(x) == doctest::Approx(d.mahalanobis_sq(x)).epsilon(1e-15));
  CHECK(d.mahalanobis_sq(x) == doctest::Approx(x.squaredNorm() / 0.1).epsilon(1e-15));
}

TEST_CASE("1D density integrates to one") {
  const GaussianDistribution g(vec({0.7}), Matrix::Constant(1, 1, 2.5));
  const double sigma = std::sqrt(2.5);
  const int n = 20000;
  const double a = 0.7 - 10 * sigma, b = 0.7 + 10 * sigma, dx = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    s += w * std::exp(g.log_pdf(vec({a + i * dx})));
  }
  CHECK(std::abs(s * dx - 1.0) < 1e-6);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(GaussianDistribution(vec({0.0, 0.0}), Matrix::Identity(3, 3)), DimensionError);
  Matrix indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(GaussianDistribution(vec({0.0, 0.0}), indef), NotPositiveDefinite);
  const GaussianDistribution g(vec({0.0}), Matrix::Identity(1, 1));
  CHECK_THROWS_AS(g.log_pdf(vec({0.0, 1.0})), DimensionError);
  RandomStream rng(1);
  CHECK_THROWS(gaussian_sample(g, rng, 0));
}

TEST_CASE("sampling moments") {
  RandomStream rng(42);
  const std::size_t n = 100000;
  const GaussianDistribution std2 = GaussianDistribution::isotropic(Vector::Zero(2), 1.0);
  const auto s = gaussian_sample(std2, rng, n);
  Vector mean = Vector::Zero(2);
  for (const auto& x : s) mean += x;
  mean /= static_cast<double>(n);
  CHECK(mean.cwiseAbs().maxCoeff() < 4.0 / std::sqrt(static_cast<double>(n)));

  const GaussianDistribution g4(vec({0.0}), Matrix::Constant(1, 1, 4.0));
  const auto t = gaussian_sample(g4, rng, n);
  double m = 0, m2 = 0;
  for (const auto& x : t) {
    m += x[0];
    m2 += x[0] * x[0];
  }
  m /= n;
  const double var = m2 / n - m * m;
  CHECK(var >= 3.8);
  CHECK(var <= 4.2);
}

TEST_CASE("empirical covariance converges") {
  Matrix cov(3, 3);
  cov << 1.0, 0.5, 0.0, 0.5, 2.0, 0.3, 0.0, 0.3, 0.7;
  const GaussianDistribution g(vec({1.0, 2.0, 3.0}), cov);
  RandomStream rng(3);
  const std::size_t n = 20000;
  const auto s = g.sample(rng, n);
  Vector mean = Vector::Zero(3);
  for (const auto& x : s) mean += x;
  mean /= static_cast<double>(n);
  Matrix emp = Matrix::Zero(3, 3);
  for (const auto& x : s) emp += (x - mean) * (x - mean).transpose();
  emp /= static_cast<double>(n - 1);
  CHECK((emp - cov).norm() / cov.norm() <= 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sampling is deterministic per seed") {
  const GaussianDistribution g = GaussianDistribution::isotropic(Vector::Zero(4), 0.3);
  RandomStream a(99), b(99);
  const auto sa = gaussian_sample(g, a, 10);
  const auto sb = gaussian_sample(g, b, 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(sa[i] == sb[i]);
}

TEST_CASE("potential evaluation and counting") {
  PotentialDensity phi([](const ParameterVector& t) { return 0.5 * t.squaredNorm(); }, 2);
  CHECK(potential_eval(phi, vec({0.0, 0.0})) == 0.0);
  CHECK(potential_eval(phi, vec({1.0, 1.0})) == 1.0);
  CHECK(phi.log_density(vec({1.0, 1.0})) == -1.0);
  const auto before = phi.eval_count();
  for (int i = 0; i < 7; ++i) phi(vec({0.1, 0.2}));
  CHECK(phi.eval_count() == before + 7);
  // copies share the counter
  const PotentialDensity copy = phi;
  copy(vec({0.0, 0.0}));
  CHECK(phi.eval_count() == before + 8);
  CHECK_THROWS_AS(phi(vec({1.0})), DimensionError);
}

TEST_CASE("gaussian potential") {
  const GaussianDistribution g = GaussianDistribution::isotropic(Vector::Zero(2), 1.0);
  const PotentialDensity phi = gaussian_potential(g);
  CHECK(phi(vec({1.0, 1.0})) == doctest::Approx(1.0));
}

TEST_CASE("random stream derivation") {
  const RandomStream root(5);
  RandomStream a = root.derive(3), b = root.derive(3), c = root.derive(4);
  CHECK(a.seed() == b.seed());
  CHECK(a.seed() != c.seed());
  CHECK(a.normal() == b.normal());
  // derivation does not depend on the parent's consumed state
  RandomStream used(5);
  used.normal();
  CHECK(used.derive(3).seed() == root.derive(3).seed());
  CHECK(root.derive(1, 2).seed() == root.derive(1).derive(2).seed());
}
