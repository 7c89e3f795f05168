#include "rcpd/datagen.hpp"

#include "rcpd/errors.hpp"
#include "rcpd/linalg.hpp"

#include <cmath>
#include <string>

namespace rcpd {
namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  return g;
}

bool is_post_change(const StreamSpec& spec, std::int64_t index) {
  return spec.change_at.has_value() && index >= *spec.change_at;
}

}  // namespace

void StreamSpec::validate() const {
  if (length < 1) throw ValidationError("stream length must be >= 1");
  if (change_at && !(*change_at > 0 && *change_at < length)) {
    throw ValidationError("change point must satisfy 0 < t_r < T (got t_r=" +
                          std::to_string(*change_at) + ", T=" + std::to_string(length) + ")");
  }
  const Eigen::Index cols = manifold == ManifoldKind::spd ? p : k;
  if (manifold == ManifoldKind::spd) {
    if (p < 1) throw ValidationError("SPD dimension must be >= 1");
    if (df < p) throw ValidationError("Wishart degrees of freedom must be >= p");
  } else if (k < 1 || k >= p) {
    throw ValidationError("Grassmann dimensions must satisfy 1 <= k < p");
  }
  if (pre.rows() != p || pre.cols() != cols) {
    throw ValidationError("pre-change parameter has the wrong shape");
  }
  if (change_at && (post.rows() != p || post.cols() != cols)) {
    throw ValidationError("post-change parameter has the wrong shape");
  }
}

Matrix random_wishart_scale(Eigen::Index p, Rng& rng) {
  const Matrix q = linalg::random_orthogonal(p, rng);
  std::uniform_real_distribution<double> uniform(std::log(0.5), std::log(2.0));
  Vector d(p);
  for (Eigen::Index i = 0; i < p; ++i) d(i) = std::exp(uniform(rng));
  return linalg::symmetrize(q * d.asDiagonal() * q.transpose());
}

Matrix random_gaussian_mean(Eigen::Index p, Eigen::Index k, double scale, Rng& rng) {
  return scale * linalg::orthonormalize(gaussian_matrix(p, k, rng));
}

StreamSpec spd_stream_spec(Eigen::Index p, std::int64_t length,
                           std::optional<std::int64_t> change_at, std::uint64_t scenario_seed) {
  Rng rng(scenario_seed);
  StreamSpec spec;
  spec.manifold = ManifoldKind::spd;
  spec.p = p;
  spec.length = length;
  spec.change_at = change_at;
  spec.pre = random_wishart_scale(p, rng);
  spec.post = random_wishart_scale(p, rng);
  spec.df = static_cast<int>(p) + 2;
  spec.seed = scenario_seed;
  return spec;
}

StreamSpec grassmann_stream_spec(Eigen::Index p, Eigen::Index k, std::int64_t length,
                                 std::optional<std::int64_t> change_at,
                                 std::uint64_t scenario_seed, double signal) {
  Rng rng(scenario_seed);
  StreamSpec spec;
  spec.manifold = ManifoldKind::grassmann;
  spec.p = p;
  spec.k = k;
  spec.length = length;
  spec.change_at = change_at;
  spec.pre = random_gaussian_mean(p, k, signal, rng);
  spec.post = random_gaussian_mean(p, k, signal, rng);
  spec.seed = scenario_seed;
  return spec;
}

Matrix sample_wishart(Rng& rng, const Matrix& scale, int df) {
  const Eigen::Index p = scale.rows();
  if (scale.cols() != p) throw ValidationError("Wishart scale matrix must be square");
  if (df < p) {
    throw ValidationError("Wishart degrees of freedom (" + std::to_string(df) +
                          ") must be >= p (" + std::to_string(p) + ")");
  }
  Eigen::LLT<Matrix> chol(scale);
  if (chol.info() != Eigen::Success) throw ValidationError("Wishart scale must be SPD");
  const Matrix z = chol.matrixL() * gaussian_matrix(p, df, rng);
  return linalg::symmetrize(z * z.transpose());
}

std::vector<Point> gen_spd_stream(const StreamSpec& spec) {
  if (spec.manifold != ManifoldKind::spd) throw ValidationError("spec is not an SPD stream");
  spec.validate();
  Rng rng(spec.seed);
  const double norm = spec.normalize ? 1.0 / spec.df : 1.0;
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(spec.length));
  for (std::int64_t i = 0; i < spec.length; ++i) {
    const Matrix& v = is_post_change(spec, i) ? spec.post : spec.pre;
    out.push_back(Point{norm * sample_wishart(rng, v, spec.df)});
  }
  return out;
}

std::vector<Point> gen_grassmann_stream(const StreamSpec& spec) {
  if (spec.manifold != ManifoldKind::grassmann) {
    throw ValidationError("spec is not a Grassmann stream");
  }
  spec.validate();
  Rng rng(spec.seed);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(spec.length));
  std::int64_t resampled = 0;
  for (std::int64_t i = 0; i < spec.length; ++i) {
    const Matrix& mean = is_post_change(spec, i) ? spec.post : spec.pre;
    for (;;) {
      const Matrix z = mean + gaussian_matrix(spec.p, spec.k, rng);
      Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeThinU);
      if (svd.singularValues()(spec.k - 1) > 1e-12) {
        out.push_back(Point{linalg::orthonormalize(svd.matrixU())});
        break;
      }
      if (++resampled > 1 + spec.length / 1000) {
        throw DataError("Grassmann generator hit more than 0.1% rank-deficient draws");
      }
    }
  }
  return out;
}

std::vector<Point> gen_stream(const StreamSpec& spec) {
  return spec.manifold == ManifoldKind::spd ? gen_spd_stream(spec) : gen_grassmann_stream(spec);
}

}  // namespace rcpd
