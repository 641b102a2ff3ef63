#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "camfis/densities.hpp"

namespace camfis {

inline constexpr double kFieldSmoothingWidth = 0.005;
inline constexpr std::size_t kFieldSegments = 6;
inline constexpr std::size_t kHeatObservations = 120;
inline constexpr std::size_t kBeamObservations = 40;

/// Logistic step (1 + exp(-(x - alpha) / width))^-1, evaluated without overflow.
double sigmoid_indicator(double x, double alpha, double width = kFieldSmoothingWidth);

/// Piecewise-constant field on [0, 1] with six equal segments whose jumps at
/// alpha_i = (i-1)/6 are smoothed by sigmoid_indicator. Values are blended
/// left to right: k_1 = v_1, k_i = (1 - I(x, alpha_i)) k_{i-1} + I(x, alpha_i) v_i.
class SmoothedPiecewiseField {
 public:
  explicit SmoothedPiecewiseField(std::span<const double> values, double width = kFieldSmoothingWidth);

  /// Scalar evaluation.
  double operator()(double x) const;

  /// Batched evaluation through the SIMD kernels.
  void evaluate(std::span<const double> xs, std::span<double> out) const;

  std::span<const double> values() const noexcept { return values_; }
  double width() const noexcept { return width_; }

  /// alpha_i = (i - 1) / 6 for i = 1..7.
  static double breakpoint(std::size_t i) { return static_cast<double>(i - 1) / static_cast<double>(kFieldSegments); }

 private:
  std::array<double, kFieldSegments> values_{};
  double width_;
};

inline double field_eval(const SmoothedPiecewiseField& f, double x) { return f(x); }

/// Mesh resolution: n elements (heat) or n grid intervals (beam); h = 1/n.
struct FidelityLevel {
  int n = 0;

  double h() const { return 1.0 / static_cast<double>(n); }
};

/// Nodal values u(j/n), j = 0..n, of the linear finite element solution of
/// -(exp(k(x; theta)) u')' = 1 on (0, 1), u(0) = 0, zero flux at x = 1.
std::vector<double> heat_solve(const ParameterVector& theta, FidelityLevel fid);

/// Heat solution at x = i/120, i = 1..120.
Vector heat_observe(const ParameterVector& theta, FidelityLevel fid);

/// Grid values u(j/n), j = 0..n, of the second-order finite difference
/// solution of (E u'')'' = 1 with E the smoothed field of |theta|, clamped at
/// x = 0 and free at x = 1.
std::vector<double> eb_solve(const ParameterVector& theta, FidelityLevel fid);

/// Linear interpolant of the beam grid solution at x = (i-1)/39, i = 1..40.
Vector eb_observe(const ParameterVector& theta, FidelityLevel fid);

/// Piecewise-linear interpolation of values on the uniform grid j/n at the
/// rational point num/den in [0, 1]. Exact at grid points.
double interpolate_uniform(std::span<const double> nodal, long num, long den);

enum class ProblemKind { heat, beam };

ProblemKind parse_problem_kind(std::string_view name);
std::string_view to_string(ProblemKind kind);

/// Parameter-to-observable map of the given problem at fidelity n.
Vector observe(ProblemKind kind, const ParameterVector& theta, FidelityLevel fid);

std::size_t observation_count(ProblemKind kind);

}  // namespace camfis
