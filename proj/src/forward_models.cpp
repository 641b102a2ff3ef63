#include "camfis/forward_models.hpp"

#include <cmath>
#include <string>

#include "camfis/banded.hpp"
#include "camfis/error.hpp"
#include "camfis/kernels.hpp"

namespace camfis {

double sigmoid_indicator(double x, double alpha, double width) {
  const double t = (x - alpha) / width;
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

SmoothedPiecewiseField::SmoothedPiecewiseField(std::span<const double> values, double width) : width_(width) {
  if (values.size() != kFieldSegments) {
    throw DimensionError("SmoothedPiecewiseField: expected " + std::to_string(kFieldSegments) + " values, got " +
                         std::to_string(values.size()));
  }
  if (!(width > 0.0)) throw Error("SmoothedPiecewiseField: width must be positive");
  for (std::size_t i = 0; i < kFieldSegments; ++i) values_[i] = values[i];
}

double SmoothedPiecewiseField::operator()(double x) const {
  double k = values_[0];
  for (std::size_t i = 2; i <= kFieldSegments; ++i) {
    const double ind = sigmoid_indicator(x, breakpoint(i), width_);
    k = (1.0 - ind) * k + ind * values_[i - 1];
  }
  return k;
}

void SmoothedPiecewiseField::evaluate(std::span<const double> xs, std::span<double> out) const {
  kernels::smoothed_field(values_, width_, xs, out);
}

namespace {

void check_theta(const ParameterVector& theta) {
  if (theta.size() != static_cast<Eigen::Index>(kFieldSegments)) {
    throw DimensionError("forward model: theta must have dimension 6, got " + std::to_string(theta.size()));
  }
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (!std::isfinite(theta[i])) throw ModelError("forward model: non-finite parameter");
  }
}

}  // namespace

std::vector<double> heat_solve(const ParameterVector& theta, FidelityLevel fid) {
  check_theta(theta);
  if (fid.n < 4) throw Error("heat_solve: need at least 4 elements");
  const std::size_t n = static_cast<std::size_t>(fid.n);
  const double h = fid.h();

  // Diffusivity at the two Gauss points of every element.
  const double g = 0.5 / std::sqrt(3.0);
  std::vector<double> xs(2 * n), a(2 * n);
  for (std::size_t e = 0; e < n; ++e) {
    const double mid = (static_cast<double>(e) + 0.5) * h;
    xs[2 * e] = mid - g * h;
    xs[2 * e + 1] = mid + g * h;
  }
  const SmoothedPiecewiseField field(std::span<const double>(theta.data(), kFieldSegments));
  field.evaluate(xs, a);
  kernels::exp(a, a);

  // Unknowns are nodes 1..n; node 0 carries the Dirichlet condition.
  std::vector<double> diag(n, 0.0), off(n - 1), u(n + 1, 0.0);
  for (std::size_t e = 0; e < n; ++e) {
    const double k_e = 0.5 * (a[2 * e] + a[2 * e + 1]) / h;
    if (e > 0) diag[e - 1] += k_e;
    diag[e] += k_e;
    if (e > 0) off[e - 1] = -k_e;
  }
  std::span<double> rhs(u.data() + 1, n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = h;
  rhs[n - 1] = 0.5 * h;
  tridiagonal_cholesky_solve(diag, off, rhs);
  return u;
}

double interpolate_uniform(std::span<const double> nodal, long num, long den) {
  const long n = static_cast<long>(nodal.size()) - 1;
  if (n < 1 || den <= 0 || num < 0 || num > den) throw Error("interpolate_uniform: point outside [0, 1]");
  const long scaled = num * n;
  const long idx = scaled / den;
  const long rem = scaled % den;
  if (rem == 0) return nodal[static_cast<std::size_t>(idx)];
  const double t = static_cast<double>(rem) / static_cast<double>(den);
  return (1.0 - t) * nodal[static_cast<std::size_t>(idx)] + t * nodal[static_cast<std::size_t>(idx) + 1];
}

Vector heat_observe(const ParameterVector& theta, FidelityLevel fid) {
  const std::vector<double> u = heat_solve(theta, fid);
  Vector obs(static_cast<Eigen::Index>(kHeatObservations));
  for (std::size_t i = 1; i <= kHeatObservations; ++i) {
    obs[static_cast<Eigen::Index>(i - 1)] = interpolate_uniform(u, static_cast<long>(i), kHeatObservations);
  }
  return obs;
}

std::vector<double> eb_solve(const ParameterVector& theta, FidelityLevel fid) {
  check_theta(theta);
  if (fid.n < 6) throw Error("eb_solve: need at least 6 grid intervals");
  std::array<double, kFieldSegments> stiffness{};
  for (std::size_t i = 0; i < kFieldSegments; ++i) {
    stiffness[i] = std::abs(theta[static_cast<Eigen::Index>(i)]);
    if (stiffness[i] < 1e-8) {
      throw ModelError("eb_solve: |theta_" + std::to_string(i + 1) + "| < 1e-8 gives a degenerate stiffness");
    }
  }
  const std::size_t n = static_cast<std::size_t>(fid.n);
  const double h = fid.h();

  std::vector<double> xs(n + 1), e(n + 1);
  for (std::size_t j = 0; j <= n; ++j) xs[j] = static_cast<double>(j) * h;
  SmoothedPiecewiseField(stiffness).evaluate(xs, e);

  // Scaled moments M_k = h^2 E_k u''_k. For 1 <= k <= n-1,
  // M_k = E_k (u_{k-1} - 2 u_k + u_{k+1}); the clamped end uses the ghost
  // value u_{-1} = u_1 so M_0 = 2 E_0 u_1; the free end has M_n = 0 and the
  // shear condition M_{n+1} = M_{n-1}. Equation j (j = 1..n) is the second
  // difference of M at j equal to h^4. Unknown u_j sits in column j - 1.
  BandedMatrix a(n, 2, 2);
  auto add_moment = [&](std::size_t row, std::size_t k, double coeff) {
    if (k == 0) {
      a.at(row, 0) += coeff * 2.0 * e[0];
      return;
    }
    if (k >= n) return;
    if (k >= 2) a.at(row, k - 2) += coeff * e[k];
    a.at(row, k - 1) += -2.0 * coeff * e[k];
    a.at(row, k) += coeff * e[k];
  };
  for (std::size_t j = 1; j < n; ++j) {
    add_moment(j - 1, j - 1, 1.0);
    add_moment(j - 1, j, -2.0);
    add_moment(j - 1, j + 1, 1.0);
  }
  add_moment(n - 1, n - 1, 2.0);

  std::vector<double> u(n + 1, 0.0);
  std::span<double> rhs(u.data() + 1, n);
  const double h4 = h * h * h * h;
  for (double& r : rhs) r = h4;
  a.solve(rhs);
  return u;
}

Vector eb_observe(const ParameterVector& theta, FidelityLevel fid) {
  const std::vector<double> u = eb_solve(theta, fid);
  const long den = static_cast<long>(kBeamObservations) - 1;
  Vector obs(static_cast<Eigen::Index>(kBeamObservations));
  for (std::size_t i = 1; i <= kBeamObservations; ++i) {
    obs[static_cast<Eigen::Index>(i - 1)] = interpolate_uniform(u, static_cast<long>(i) - 1, den);
  }
  return obs;
}

ProblemKind parse_problem_kind(std::string_view name) {
  if (name == "heat") return ProblemKind::heat;
  if (name == "beam") return ProblemKind::beam;
  throw ConfigError("unknown problem '" + std::string(name) + "' (expected heat or beam)");
}

std::string_view to_string(ProblemKind kind) { return kind == ProblemKind::heat ? "heat" : "beam"; }

Vector observe(ProblemKind kind, const ParameterVector& theta, FidelityLevel fid) {
  return kind == ProblemKind::heat ? heat_observe(theta, fid) : eb_observe(theta, fid);
}

std::size_t observation_count(ProblemKind kind) {
  return kind == ProblemKind::heat ? kHeatObservations : kBeamObservations;
}

}  // namespace camfis
