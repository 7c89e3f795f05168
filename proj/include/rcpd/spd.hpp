#pragma once

#include "rcpd/manifold.hpp"

namespace rcpd {

/// Symmetric positive definite p x p matrices under the affine-invariant
/// metric <v, w>_a = tr(a^-1 v a^-1 w).
///
/// distance(a, b) = ||logm(a^-1/2 b a^-1/2)||_F
/// log(a, b)      = a^1/2 logm(a^-1/2 b a^-1/2) a^1/2
/// exp(a, v)      = a^1/2 expm(a^-1/2 v a^-1/2) a^1/2
/// retract(a, v)  = a + v + 1/2 v a^-1 v, symmetrized
///
/// All spectral functions go through the generalized symmetric eigenproblem
/// b x = l a x, which yields a^-1 b = V L V^T a with V^T a V = I.
class Spd final : public Manifold {
 public:
  explicit Spd(Eigen::Index p);

  ManifoldKind kind() const override { return ManifoldKind::spd; }
  Eigen::Index rows() const override { return p_; }
  Eigen::Index cols() const override { return p_; }

  double distance(const Point& a, const Point& b) const override;
  Tangent log(const Point& a, const Point& b) const override;
  LogResult log_with_distance(const Point& a, const Point& b) const override;
  Point exp(const Point& a, const Tangent& v) const override;
  Point retract(const Point& a, const Tangent& v) const override;
  double inner(const Point& a, const Tangent& v, const Tangent& w) const override;

  void validate(const Point& a) const override;
  void validate_tangent(const Point& a, const Tangent& v) const override;
  Tangent project(const Point& a, const Matrix& ambient) const override;

  /// Smallest eigenvalue accepted by validate().
  static constexpr double kMinEigenvalue = 1e-12;
  /// Floor applied when a retraction leaves the cone.
  static constexpr double kRepairFloor = 1e-10;
  static constexpr double kSymmetryTol = 1e-10;

 private:
  Eigen::Index p_;
};

}  // namespace rcpd
