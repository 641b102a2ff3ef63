#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace camfis {

/// Solves the SPD tridiagonal system with diagonal `diag` and sub/super
/// diagonal `off` (off[i] couples rows i and i+1) by Cholesky factorization.
/// Overwrites rhs with the solution. Throws NotPositiveDefinite when a pivot
/// is not positive.
void tridiagonal_cholesky_solve(std::span<const double> diag, std::span<const double> off, std::span<double> rhs);

/// Square banded matrix with kl sub- and ku super-diagonals, LAPACK-style
/// storage with kl extra rows for fill-in from partial pivoting.
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

  std::size_t size() const noexcept { return n_; }
  std::size_t lower() const noexcept { return kl_; }
  std::size_t upper() const noexcept { return ku_; }

  /// Entry (i, j); requires |i - j| inside the band.
  double& at(std::size_t i, std::size_t j);
  double at(std::size_t i, std::size_t j) const;

  /// y = A x using the original band (call before solve()).
  std::vector<double> multiply(std::span<const double> x) const;

  /// Gaussian elimination with partial pivoting; factors in place and
  /// overwrites rhs with the solution. Throws ModelError when singular.
  void solve(std::span<double> rhs);

 private:
  double& raw(std::size_t i, std::size_t j) { return band_[(kl_ + ku_ + i - j) + j * ldab_]; }
  double raw(std::size_t i, std::size_t j) const { return band_[(kl_ + ku_ + i - j) + j * ldab_]; }

  std::size_t n_, kl_, ku_, ldab_;
  std::vector<double> band_;
};

}  // namespace camfis
