#include "rcpd/spd.hpp"

#include "rcpd/errors.hpp"
#include "rcpd/linalg.hpp"
#include "rcpd/logging.hpp"

#include <cmath>
#include <string>

namespace rcpd {
namespace {

// Any factor a = L L^T serves as a square root for the affine-invariant
// formulas: log(a, b) = L logm(L^-1 b L^-T) L^T, and so on. Cholesky is
// cheaper and better conditioned than the symmetric square root.
struct Whitened {
  Eigen::LLT<Matrix> chol;
  Matrix c;  // L^-1 b L^-T
};

double scale_of(const Matrix& x) { return std::max(1.0, x.cwiseAbs().maxCoeff()); }

void check_symmetric(const Matrix& x, const char* what) {
  const double asym = (x - x.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= Spd::kSymmetryTol * scale_of(x))) {
    throw ValidationError(std::string(what) + " is not symmetric (max asymmetry " +
                          std::to_string(asym) + ")");
  }
}

Eigen::LLT<Matrix> factor(const Matrix& a) {
  Eigen::LLT<Matrix> chol(a);
  if (chol.info() != Eigen::Success || !a.allFinite()) {
    throw ValidationError("matrix is not positive definite");
  }
  return chol;
}

Matrix whiten(const Eigen::LLT<Matrix>& chol, const Matrix& x) {
  Matrix left = chol.matrixL().solve(x);
  Matrix c = chol.matrixL().solve(left.transpose());
  return linalg::symmetrize(c);
}

Matrix color(const Eigen::LLT<Matrix>& chol, const Matrix& x) {
  Matrix l = chol.matrixL();
  return linalg::symmetrize(l * x * l.transpose());
}

}  // namespace

Spd::Spd(Eigen::Index p) : p_(p) {
  if (p < 1) throw ValidationError("SPD dimension must be >= 1");
}

void Spd::validate(const Point& a) const {
  if (a.data.rows() != p_ || a.data.cols() != p_) {
    throw ValidationError("SPD point has shape " + std::to_string(a.data.rows()) + "x" +
                          std::to_string(a.data.cols()) + ", expected " + std::to_string(p_) +
                          "x" + std::to_string(p_));
  }
  if (!a.data.allFinite()) throw ValidationError("SPD point has non-finite entries");
  check_symmetric(a.data, "SPD point");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a.data, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= kMinEigenvalue) {
    throw ValidationError("SPD point has smallest eigenvalue " +
                          std::to_string(eig.eigenvalues().minCoeff()));
  }
}

void Spd::validate_tangent(const Point& a, const Tangent& v) const {
  if (v.data.rows() != p_ || v.data.cols() != p_ || a.data.rows() != p_ ||
      a.data.cols() != p_) {
    throw ValidationError("SPD tangent shape mismatch");
  }
  check_symmetric(v.data, "SPD tangent vector");
}

Tangent Spd::project(const Point&, const Matrix& ambient) const {
  return Tangent{linalg::symmetrize(ambient)};
}

double Spd::distance(const Point& a, const Point& b) const {
  return log_with_distance(a, b).distance;
}

Tangent Spd::log(const Point& a, const Point& b) const { return log_with_distance(a, b).log; }

LogResult Spd::log_with_distance(const Point& a, const Point& b) const {
  if (a.data.rows() != p_ || b.data.rows() != p_ || a.data.cols() != p_ ||
      b.data.cols() != p_) {
    throw ValidationError("SPD operands do not match the manifold dimension");
  }
  const auto chol = factor(a.data);
  if (a.data == b.data) return {zero_tangent(), 0.0};
  Eigen::SelfAdjointEigenSolver<Matrix> eig(whiten(chol, b.data));
  const Vector& lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > 0.0)) throw ValidationError("matrix is not positive definite");
  Vector log_lambda = lambda.array().log().matrix();
  const Matrix& w = eig.eigenvectors();
  Matrix inner_log = w * log_lambda.asDiagonal() * w.transpose();
  return {Tangent{color(chol, inner_log)}, log_lambda.norm()};
}

Point Spd::exp(const Point& a, const Tangent& v) const {
  validate_tangent(a, v);
  const auto chol = factor(a.data);
  Matrix inner_exp = linalg::sym_exp(whiten(chol, v.data));
  return Point{color(chol, inner_exp)};
}

Point Spd::retract(const Point& a, const Tangent& v) const {
  validate_tangent(a, v);
  const auto chol = factor(a.data);
  Matrix x = a.data + v.data + 0.5 * v.data * chol.solve(v.data);
  x = linalg::symmetrize(x);
  // a + v + v a^-1 v / 2 = a/2 + (a + v) a^-1 (a + v) / 2 is SPD in exact
  // arithmetic, so this only triggers on overflow or catastrophic rounding.
  Eigen::LLT<Matrix> check(x);
  if (check.info() != Eigen::Success || !x.allFinite()) {
    log_warning("SPD retraction left the cone; flooring eigenvalues at 1e-10");
    x = linalg::sym_function(x, [](double l) { return std::max(l, kRepairFloor); });
  }
  return Point{std::move(x)};
}

double Spd::inner(const Point& a, const Tangent& v, const Tangent& w) const {
  if (v.data.rows() != p_ || v.data.cols() != p_ || w.data.rows() != p_ ||
      w.data.cols() != p_) {
    throw ValidationError("SPD tangent shape mismatch");
  }
  const auto chol = factor(a.data);
  Matrix av = chol.solve(v.data);
  Matrix aw = chol.solve(w.data);
  return av.cwiseProduct(aw.transpose()).sum();
}

}  // namespace rcpd
