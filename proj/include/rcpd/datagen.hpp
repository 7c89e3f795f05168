#pragma once

#include "rcpd/manifold.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace rcpd {

using Rng = std::mt19937_64;

/// Declarative description of a synthetic stream.
///
/// SPD streams draw Wishart(V, df) matrices, optionally divided by df so the
/// stream mean equals V. Grassmann streams draw Z = M + E with E standard
/// normal and keep the top-k left singular vectors of Z. `pre` / `post` hold
/// V (p x p) or M (p x k) before and after the change.
struct StreamSpec {
  ManifoldKind manifold = ManifoldKind::spd;
  Eigen::Index p = 10;
  Eigen::Index k = 0;  ///< Grassmann only
  std::int64_t length = 2000;
  std::optional<std::int64_t> change_at;  ///< first post-change sample index
  Matrix pre;
  Matrix post;
  int df = 12;  ///< SPD only
  bool normalize = true;
  std::uint64_t seed = 0;  ///< noise seed

  void validate() const;
};

/// V = Q D Q^T with Q Haar-orthogonal and log-uniform eigenvalues in [0.5, 2].
Matrix random_wishart_scale(Eigen::Index p, Rng& rng);

/// Seeded p x k matrix with orthonormal columns, scaled by `scale`.
Matrix random_gaussian_mean(Eigen::Index p, Eigen::Index k, double scale, Rng& rng);

/// SPD stream with df = p + 2 and independently drawn V_pre / V_post.
/// `scenario_seed` fixes V_pre and V_post; the noise seed starts equal to it.
StreamSpec spd_stream_spec(Eigen::Index p, std::int64_t length,
                           std::optional<std::int64_t> change_at, std::uint64_t scenario_seed);

/// Grassmann stream with means of orthonormal columns scaled by `signal`.
StreamSpec grassmann_stream_spec(Eigen::Index p, Eigen::Index k, std::int64_t length,
                                 std::optional<std::int64_t> change_at,
                                 std::uint64_t scenario_seed, double signal = 20.0);

/// Sum of df outer products z z^T with z ~ N(0, V). Throws if df < p.
Matrix sample_wishart(Rng& rng, const Matrix& scale, int df);

std::vector<Point> gen_spd_stream(const StreamSpec& spec);
std::vector<Point> gen_grassmann_stream(const StreamSpec& spec);
/// Dispatches on spec.manifold.
std::vector<Point> gen_stream(const StreamSpec& spec);

/// Derives the per-run seed used by Monte Carlo sweeps.
inline std::uint64_t run_seed(std::uint64_t base, std::uint64_t run_index) {
  return base ^ run_index;
}

}  // namespace rcpd
