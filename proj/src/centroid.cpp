#include "rcpd/centroid.hpp"

#include "rcpd/errors.hpp"

#include <cmath>
#include <string>

namespace rcpd {

void HuberConfig::validate() const {
  if (!(threshold > 0.0)) {
    throw ValidationError("Huber threshold A must be > 0 (got " + std::to_string(threshold) + ")");
  }
  if (!(step > 0.0 && step <= 1.0)) {
    throw ValidationError("step size must lie in (0, 1] (got " + std::to_string(step) + ")");
  }
}

double huber_weight(double threshold, double a) {
  if (a <= threshold) return 1.0;
  return threshold / a;
}

Tangent karcher_stochastic_gradient(const Manifold& ops, const Point& m, const Point& x) {
  return -ops.log(m, x);
}

namespace {

Tangent scaled_gradient(const Manifold& ops, double threshold, const Point& m, const Point& x) {
  LogResult r = ops.log_with_distance(m, x);
  r.log *= -huber_weight(threshold, r.distance);
  return std::move(r.log);
}

}  // namespace

Tangent robust_stochastic_gradient(const Manifold& ops, double threshold, const Point& m,
                                   const Point& x) {
  return scaled_gradient(ops, threshold, m, x);
}

Point sgd_step(const Manifold& ops, const HuberConfig& cfg, const Point& m, const Point& x) {
  Tangent direction = scaled_gradient(ops, cfg.threshold, m, x);
  direction *= -cfg.step;
  return ops.retract(m, direction);
}

double robust_cost(const Manifold& ops, double threshold, const Point& m,
                   std::span<const Point> samples) {
  if (samples.empty()) throw ValidationError("robust_cost needs at least one sample");
  double total = 0.0;
  for (const Point& x : samples) {
    const double d = ops.distance(m, x);
    total += d <= threshold ? 0.5 * d * d : threshold * d - 0.5 * threshold * threshold;
  }
  return total / static_cast<double>(samples.size());
}

Tangent full_robust_gradient(const Manifold& ops, double threshold, const Point& m,
                             std::span<const Point> samples) {
  if (samples.empty()) throw ValidationError("gradient needs at least one sample");
  Tangent grad = ops.zero_tangent();
  for (const Point& x : samples) grad += scaled_gradient(ops, threshold, m, x);
  grad *= 1.0 / static_cast<double>(samples.size());
  return grad;
}

Point batch_frechet_mean(const Manifold& ops, double threshold, std::span<const Point> samples,
                         const FrechetOptions& options) {
  if (samples.empty()) throw ValidationError("batch_frechet_mean needs at least one sample");
  if (!(options.tol > 0.0)) throw ValidationError("tolerance must be positive");
  Point m = samples.front();
  double grad_norm = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    Tangent grad = full_robust_gradient(ops, threshold, m, samples);
    grad_norm = ops.norm(m, grad);
    if (grad_norm <= options.tol) return m;
    m = ops.exp(m, ops.project(m, (-options.step * grad).data));
  }
  throw ConvergenceError("batch_frechet_mean did not converge in " +
                             std::to_string(options.max_iterations) +
                             " iterations (gradient norm " + std::to_string(grad_norm) + ")",
                         grad_norm);
}

}  // namespace rcpd
