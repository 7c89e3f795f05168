#include "rcpd/grassmann.hpp"

#include "rcpd/errors.hpp"
#include "rcpd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rcpd {

Grassmann::Grassmann(Eigen::Index p, Eigen::Index k) : p_(p), k_(k) {
  if (k < 1 || k >= p) {
    throw ValidationError("Grassmann dimensions must satisfy 1 <= k < p (got p=" +
                          std::to_string(p) + ", k=" + std::to_string(k) + ")");
  }
}

void Grassmann::check_shape(const Matrix& m, const char* what) const {
  if (m.rows() != p_ || m.cols() != k_) {
    throw ValidationError(std::string(what) + " has shape " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", expected " + std::to_string(p_) + "x" +
                          std::to_string(k_));
  }
}

void Grassmann::validate(const Point& a) const {
  check_shape(a.data, "Grassmann point");
  if (!a.data.allFinite()) throw ValidationError("Grassmann point has non-finite entries");
  const double err = (a.data.transpose() * a.data - Matrix::Identity(k_, k_)).norm();
  if (!(err <= kOrthonormalityTol)) {
    throw ValidationError("Grassmann point columns are not orthonormal (||U^T U - I|| = " +
                          std::to_string(err) + ")");
  }
}

void Grassmann::validate_tangent(const Point& a, const Tangent& v) const {
  check_shape(a.data, "Grassmann base point");
  check_shape(v.data, "Grassmann tangent vector");
  const double vertical = (a.data.transpose() * v.data).norm();
  if (!(vertical <= kHorizontalTol)) {
    throw ValidationError("Grassmann tangent vector is not horizontal (||U^T v|| = " +
                          std::to_string(vertical) + ")");
  }
}

Tangent Grassmann::project(const Point& a, const Matrix& ambient) const {
  return Tangent{ambient - a.data * (a.data.transpose() * ambient)};
}

Vector Grassmann::principal_angles(const Point& a, const Point& b) const {
  check_shape(a.data, "Grassmann point");
  check_shape(b.data, "Grassmann point");
  if (a.data == b.data) return Vector::Zero(k_);
  const Matrix m = a.data.transpose() * b.data;
  // Cosines lose all resolution for small angles, so those are recovered from
  // the sines, i.e. the singular values of (I - U_a U_a^T) U_b.
  Eigen::JacobiSVD<Matrix> cos_svd(m);
  Eigen::JacobiSVD<Matrix> sin_svd(b.data - a.data * m);
  const Vector& cosines = cos_svd.singularValues();  // descending
  const Vector& sines = sin_svd.singularValues();    // descending
  Vector angles(k_);
  for (Eigen::Index i = 0; i < k_; ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    const double s = std::clamp(sines(k_ - 1 - i), 0.0, 1.0);
    angles(i) = (c * c >= 0.5) ? std::asin(s) : std::acos(c);
  }
  return angles;
}

double Grassmann::distance(const Point& a, const Point& b) const {
  return principal_angles(a, b).norm();
}

Tangent Grassmann::log(const Point& a, const Point& b) const {
  return log_with_distance(a, b).log;
}

LogResult Grassmann::log_with_distance(const Point& a, const Point& b) const {
  check_shape(a.data, "Grassmann point");
  check_shape(b.data, "Grassmann point");
  if (a.data == b.data) return {zero_tangent(), 0.0};
  const Matrix m = a.data.transpose() * b.data;
  Eigen::JacobiSVD<Matrix> m_svd(m);
  const double smallest = m_svd.singularValues()(k_ - 1);
  if (smallest < kCutLocusTol) {
    throw DegeneratePairError("Grassmann log undefined: smallest singular value of U_a^T U_b is " +
                              std::to_string(smallest));
  }
  // B = (I - U_a U_a^T) U_b M^-1, computed as a solve against M^T.
  const Matrix residual = b.data - a.data * m;
  const Matrix bmat = m.transpose().partialPivLu().solve(residual.transpose()).transpose();
  Eigen::JacobiSVD<Matrix> svd(bmat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector angles = svd.singularValues().array().atan().matrix();
  Matrix v = svd.matrixU() * angles.asDiagonal() * svd.matrixV().transpose();
  // Round-off leaves a vertical component of order 1e-16; remove it.
  v -= a.data * (a.data.transpose() * v);
  return {Tangent{std::move(v)}, angles.norm()};
}

Point Grassmann::exp(const Point& a, const Tangent& v) const {
  validate_tangent(a, v);
  if (v.data.isZero(0.0)) return a;
  Eigen::JacobiSVD<Matrix> svd(v.data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const Matrix& w = svd.matrixU();
  const Matrix& vr = svd.matrixV();
  Vector c = sigma.array().cos().matrix();
  Vector s = sigma.array().sin().matrix();
  Matrix y = a.data * vr * c.asDiagonal() * vr.transpose() + w * s.asDiagonal() * vr.transpose();
  return Point{linalg::orthonormalize(y)};
}

Point Grassmann::retract(const Point& a, const Tangent& v) const {
  validate_tangent(a, v);
  if (v.data.isZero(0.0)) return a;
  Matrix gram = Matrix::Identity(k_, k_) + v.data.transpose() * v.data;
  Matrix y = (a.data + v.data) * linalg::sym_inv_sqrt(gram);
  return Point{linalg::orthonormalize(y)};
}

double Grassmann::inner(const Point& a, const Tangent& v, const Tangent& w) const {
  check_shape(a.data, "Grassmann base point");
  check_shape(v.data, "Grassmann tangent vector");
  check_shape(w.data, "Grassmann tangent vector");
  return v.data.cwiseProduct(w.data).sum();
}

}  // namespace rcpd
