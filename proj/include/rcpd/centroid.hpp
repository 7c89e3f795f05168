#pragma once

#include "rcpd/manifold.hpp"

#include <limits>
#include <span>

namespace rcpd {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Huber threshold and SGD step size shared by the centroid trackers.
/// threshold = +infinity turns the robust centroid into the Karcher mean.
struct HuberConfig {
  double threshold = kInfinity;
  double step = 0.05;

  /// Throws ValidationError unless threshold > 0 and 0 < step <= 1.
  void validate() const;
};

/// rho(a) = min(1, A / a); returns 1 for a = 0 and for A = infinity.
double huber_weight(double threshold, double a);

/// Stochastic Riemannian gradient of the Karcher variance at m for sample x,
/// namely -log_m(x).
Tangent karcher_stochastic_gradient(const Manifold& ops, const Point& m, const Point& x);

/// Karcher gradient scaled by huber_weight(A, d(m, x)).
Tangent robust_stochastic_gradient(const Manifold& ops, double threshold, const Point& m,
                                   const Point& x);

/// One Riemannian SGD update: retract(m, -step * H_rho(m, x)).
Point sgd_step(const Manifold& ops, const HuberConfig& cfg, const Point& m, const Point& x);

/// Empirical Huber cost: mean of d^2/2 for d <= A and A d - A^2/2 beyond,
/// with d = d(m, x_i). Its Riemannian gradient is full_robust_gradient.
double robust_cost(const Manifold& ops, double threshold, const Point& m,
                   std::span<const Point> samples);

/// Mean of robust_stochastic_gradient over the samples.
Tangent full_robust_gradient(const Manifold& ops, double threshold, const Point& m,
                             std::span<const Point> samples);

struct FrechetOptions {
  double tol = 1e-10;
  double step = 0.5;
  int max_iterations = 10000;
};

/// Batch full-gradient descent on the robust cost, starting from the first
/// sample and moving along the exact exponential map. Test oracle only.
/// Throws ConvergenceError if the gradient norm stays above tol.
Point batch_frechet_mean(const Manifold& ops, double threshold, std::span<const Point> samples,
                         const FrechetOptions& options = {});

}  // namespace rcpd
