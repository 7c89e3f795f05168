#pragma once

#include "rcpd/manifold.hpp"

namespace rcpd {

/// k-dimensional subspaces of R^p, each represented by a p x k matrix with
/// orthonormal columns. Canonical metric <v, w> = tr(v^T w) on horizontal
/// vectors (U^T v = 0). Distances are the 2-norm of the principal angles.
class Grassmann final : public Manifold {
 public:
  Grassmann(Eigen::Index p, Eigen::Index k);

  ManifoldKind kind() const override { return ManifoldKind::grassmann; }
  Eigen::Index rows() const override { return p_; }
  Eigen::Index cols() const override { return k_; }

  double distance(const Point& a, const Point& b) const override;
  Tangent log(const Point& a, const Point& b) const override;
  LogResult log_with_distance(const Point& a, const Point& b) const override;
  Point exp(const Point& a, const Tangent& v) const override;
  /// Polar retraction (U + v)(I + v^T v)^-1/2.
  Point retract(const Point& a, const Tangent& v) const override;
  double inner(const Point& a, const Tangent& v, const Tangent& w) const override;

  void validate(const Point& a) const override;
  void validate_tangent(const Point& a, const Tangent& v) const override;
  Tangent project(const Point& a, const Matrix& ambient) const override;

  /// Principal angles between span(a) and span(b), ascending.
  Vector principal_angles(const Point& a, const Point& b) const;

  static constexpr double kOrthonormalityTol = 1e-10;
  static constexpr double kHorizontalTol = 1e-8;
  /// Smallest singular value of U_a^T U_b accepted by log().
  static constexpr double kCutLocusTol = 1e-10;

 private:
  void check_shape(const Matrix& m, const char* what) const;

  Eigen::Index p_;
  Eigen::Index k_;
};

}  // namespace rcpd
