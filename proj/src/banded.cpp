#include "camfis/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "camfis/error.hpp"

namespace camfis {

void tridiagonal_cholesky_solve(std::span<const double> diag, std::span<const double> off, std::span<double> rhs) {
  const std::size_t n = diag.size();
  if (n == 0 || rhs.size() != n || off.size() + 1 < n) {
    throw DimensionError("tridiagonal_cholesky_solve: inconsistent sizes");
  }
  // L has diagonal l[i] and subdiagonal s[i] (row i+1, column i).
  std::vector<double> l(n), s(n > 1 ? n - 1 : 0);
  double pivot = diag[0];
  for (std::size_t i = 0;; ++i) {
    if (!(pivot > 0.0)) {
      throw NotPositiveDefinite("tridiagonal Cholesky: nonpositive pivot at row " + std::to_string(i));
    }
    l[i] = std::sqrt(pivot);
    if (i + 1 == n) break;
    s[i] = off[i] / l[i];
    pivot = diag[i + 1] - s[i] * s[i];
  }
  rhs[0] /= l[0];
  for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - s[i - 1] * rhs[i - 1]) / l[i];
  rhs[n - 1] /= l[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - s[i] * rhs[i + 1]) / l[i];
}

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), band_(ldab_ * n, 0.0) {
  if (n == 0) throw DimensionError("BandedMatrix: empty matrix");
}

double& BandedMatrix::at(std::size_t i, std::size_t j) {
  if (i >= n_ || j >= n_ || i > j + kl_ || j > i + ku_) {
    throw DimensionError("BandedMatrix: entry (" + std::to_string(i) + ", " + std::to_string(j) + ") outside band");
  }
  return raw(i, j);
}

double BandedMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_ || i > j + kl_ || j > i + ku_) return 0.0;
  return raw(i, j);
}

std::vector<double> BandedMatrix::multiply(std::span<const double> x) const {
  if (x.size() != n_) throw DimensionError("BandedMatrix::multiply: size mismatch");
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > kl_ ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    for (std::size_t j = j0; j <= j1; ++j) y[i] += raw(i, j) * x[j];
  }
  return y;
}

void BandedMatrix::solve(std::span<double> rhs) {
  if (rhs.size() != n_) throw DimensionError("BandedMatrix::solve: size mismatch");
  const std::size_t kv = kl_ + ku_;
  for (std::size_t k = 0; k < n_; ++k) {
    const std::size_t last_row = std::min(n_ - 1, k + kl_);
    const std::size_t last_col = std::min(n_ - 1, k + kv);

    std::size_t p = k;
    for (std::size_t i = k + 1; i <= last_row; ++i) {
      if (std::abs(raw(i, k)) > std::abs(raw(p, k))) p = i;
    }
    if (raw(p, k) == 0.0) throw ModelError("banded solve: matrix is singular at column " + std::to_string(k));
    if (p != k) {
      for (std::size_t j = k; j <= last_col; ++j) std::swap(raw(k, j), raw(p, j));
      std::swap(rhs[k], rhs[p]);
    }
    const double inv_pivot = 1.0 / raw(k, k);
    for (std::size_t i = k + 1; i <= last_row; ++i) {
      const double factor = raw(i, k) * inv_pivot;
      if (factor == 0.0) continue;
      raw(i, k) = factor;
      for (std::size_t j = k + 1; j <= last_col; ++j) raw(i, j) -= factor * raw(k, j);
      rhs[i] -= factor * rhs[k];
    }
  }
  for (std::size_t k = n_; k-- > 0;) {
    double acc = rhs[k];
    const std::size_t last_col = std::min(n_ - 1, k + kv);
    for (std::size_t j = k + 1; j <= last_col; ++j) acc -= raw(k, j) * rhs[j];
    rhs[k] = acc / raw(k, k);
  }
}

}  // namespace camfis
