#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>

namespace rcpd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ManifoldKind { spd, grassmann };

std::string to_string(ManifoldKind kind);

/// A point on a manifold. For SPD the data is a symmetric positive definite
/// p x p matrix; for Grassmann it is an orthonormal p x k representative.
struct Point {
  Matrix data;
};

/// A tangent vector. The base point is always passed alongside it to the
/// manifold operations, so it is not stored here.
struct Tangent {
  Matrix data;

  Tangent& operator+=(const Tangent& other) {
    data += other.data;
    return *this;
  }
  Tangent& operator*=(double s) {
    data *= s;
    return *this;
  }
};

inline Tangent operator*(double s, const Tangent& v) { return Tangent{s * v.data}; }
inline Tangent operator*(const Tangent& v, double s) { return Tangent{s * v.data}; }
inline Tangent operator+(const Tangent& a, const Tangent& b) { return Tangent{a.data + b.data}; }
inline Tangent operator-(const Tangent& v) { return Tangent{-v.data}; }

/// Log map together with the geodesic distance it implies. Both come out of
/// the same decomposition, so computing them jointly halves the work in the
/// SGD inner loop.
struct LogResult {
  Tangent log;
  double distance;
};

/// Geometry contract shared by every manifold. The centroid and detector code
/// is written once against this interface.
///
/// All methods are const and free of hidden state, so a single instance can be
/// shared by any number of threads.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual ManifoldKind kind() const = 0;
  /// Shape of the matrix that represents a point.
  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;

  virtual double distance(const Point& x, const Point& y) const = 0;
  /// Inverse exponential map. Throws DegeneratePairError where undefined.
  virtual Tangent log(const Point& x, const Point& y) const = 0;
  virtual LogResult log_with_distance(const Point& x, const Point& y) const;
  /// Exact exponential map.
  virtual Point exp(const Point& x, const Tangent& v) const = 0;
  /// Second-order retraction used by the stochastic updates.
  virtual Point retract(const Point& x, const Tangent& v) const = 0;
  virtual double inner(const Point& x, const Tangent& v, const Tangent& w) const = 0;

  /// Throws ValidationError if x is not a valid point.
  virtual void validate(const Point& x) const = 0;
  /// Throws ValidationError if v is not a tangent vector at x.
  virtual void validate_tangent(const Point& x, const Tangent& v) const = 0;

  /// Projects an arbitrary ambient matrix onto the tangent space at x.
  virtual Tangent project(const Point& x, const Matrix& ambient) const = 0;

  bool is_valid(const Point& x) const;
  double norm(const Point& x, const Tangent& v) const;
  Tangent zero_tangent() const { return Tangent{Matrix::Zero(rows(), cols())}; }
  std::string describe() const;
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

}  // namespace rcpd
