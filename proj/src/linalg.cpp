#include "rcpd/linalg.hpp"

#include <cmath>

namespace rcpd::linalg {

Matrix symmetrize(const Matrix& x) { return 0.5 * (x + x.transpose()); }

Matrix sym_function(const Matrix& sym, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  Vector mapped = eig.eigenvalues().unaryExpr(f);
  const Matrix& q = eig.eigenvectors();
  return q * mapped.asDiagonal() * q.transpose();
}

Matrix sym_sqrt(const Matrix& spd) {
  return sym_function(spd, [](double l) { return std::sqrt(l); });
}

Matrix sym_inv_sqrt(const Matrix& spd) {
  return sym_function(spd, [](double l) { return 1.0 / std::sqrt(l); });
}

Matrix sym_log(const Matrix& spd) {
  return sym_function(spd, [](double l) { return std::log(l); });
}

Matrix sym_exp(const Matrix& sym) {
  return sym_function(sym, [](double l) { return std::exp(l); });
}

Matrix orthonormalize(const Matrix& a) {
  const Eigen::Index k = a.cols();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), k);
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Matrix fix_column_signs(const Matrix& u) {
  Matrix out = u;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      if (std::abs(out(i, j)) > 1e-12) {
        if (out(i, j) < 0.0) out.col(j) *= -1.0;
        break;
      }
    }
  }
  return out;
}

}  // namespace rcpd::linalg
