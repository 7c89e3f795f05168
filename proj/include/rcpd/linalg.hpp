#pragma once

#include "rcpd/manifold.hpp"

#include <functional>

namespace rcpd::linalg {

/// (X + X^T) / 2
Matrix symmetrize(const Matrix& x);

/// Applies f to the eigenvalues of a symmetric matrix: Q f(L) Q^T.
Matrix sym_function(const Matrix& sym, const std::function<double(double)>& f);

Matrix sym_sqrt(const Matrix& spd);
Matrix sym_inv_sqrt(const Matrix& spd);
Matrix sym_log(const Matrix& spd);
Matrix sym_exp(const Matrix& sym);

/// Orthonormal basis of the column space via Householder QR, with the signs
/// fixed so that diag(R) >= 0. Returns the thin Q factor.
Matrix orthonormalize(const Matrix& a);

/// Haar-distributed orthogonal n x n matrix from a seeded Gaussian draw.
template <class Rng>
Matrix random_orthogonal(Eigen::Index n, Rng& rng);

/// Flips each column so that its first entry with |value| > 1e-12 is positive.
Matrix fix_column_signs(const Matrix& u);

}  // namespace rcpd::linalg

#include <random>

namespace rcpd::linalg {

template <class Rng>
Matrix random_orthogonal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = normal(rng);
  return orthonormalize(g);
}

}  // namespace rcpd::linalg
