#pragma once

// Synthetic Gaussian mixtures with planted priors.
//
// Sampling order for a MixtureSpec with seed s:
//   stream 0      one uniform per sample, inverse CDF over pi_true -> label
//   stream 1 + j  d standard normals per sample of class j, x = z_j + L g
//                 with L the lower Cholesky factor of sigma
// Helper generators (prototypes, covariances, priors) draw from their own
// seeds so a spec can be rebuilt piecewise.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "frolic/error.hpp"
#include "frolic/random.hpp"
#include "frolic/types.hpp"

namespace frolic::synth {

struct MixtureSpec {
  Index classes = 0;
  Index dim = 0;
  Index samples = 0;
  Matrix prototypes;  // K x d class means
  Matrix sigma;       // shared d x d covariance
  Vector pi_true;     // downstream class frequencies
  std::optional<Vector> beta_true;  // planted pre-training prior
  std::uint64_t seed = 0;
};

struct Sample {
  EmbeddingSet embeddings;
  LabelSet labels;
};

inline Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  random::Stream rng(seed, 0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

/// Rows of a seeded Gaussian matrix, orthonormalized by modified Gram-Schmidt
/// in row order. Requires rows <= cols.
inline Matrix orthonormal_rows(Index rows, Index cols, std::uint64_t seed) {
  if (rows > cols) throw Error(ErrorCode::kInvalidSpec, "cannot fit more orthonormal rows than columns");
  Matrix q = gaussian_matrix(rows, cols, seed);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < i; ++j) q.row(i) -= q.row(i).dot(q.row(j)) * q.row(j);
    const double norm = q.row(i).norm();
    if (norm < 1e-12) throw Error(ErrorCode::kInvalidSpec, "degenerate Gram-Schmidt draw");
    q.row(i) /= norm;
  }
  return q;
}

/// Q diag(lambda) Q^T with a seeded orthonormal Q and eigenvalues spread
/// log-uniformly over [eig_lo, eig_hi].
inline Matrix random_covariance(Index dim, double eig_lo, double eig_hi, std::uint64_t seed) {
  if (!(eig_lo > 0.0) || eig_hi < eig_lo) throw Error(ErrorCode::kInvalidSpec, "bad eigenvalue range");
  const Matrix q = orthonormal_rows(dim, dim, random::stream_seed(seed, 1));
  random::Stream rng(seed, 2);
  Vector eig(dim);
  for (Index i = 0; i < dim; ++i) {
    eig(i) = std::exp(std::log(eig_lo) + rng.uniform() * (std::log(eig_hi) - std::log(eig_lo)));
  }
  Matrix sigma = q.transpose() * eig.asDiagonal() * q;
  return 0.5 * (sigma + sigma.transpose());
}

/// Log-normal prior: beta_j proportional to exp(spread * g_j).
inline Vector random_prior(Index classes, double spread, std::uint64_t seed) {
  random::Stream rng(seed, 0);
  Vector beta(classes);
  for (Index j = 0; j < classes; ++j) beta(j) = std::exp(spread * rng.normal());
  return beta / beta.sum();
}

namespace detail {

inline bool on_simplex(const Vector& v) {
  return (v.array() >= 0.0).all() && std::abs(v.sum() - 1.0) <= 1e-9;
}

}  // namespace detail

inline void validate(const MixtureSpec& spec) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidSpec, why); };
  if (spec.classes < 1 || spec.dim < 1 || spec.samples < 1) fail("counts must be positive");
  if (spec.prototypes.rows() != spec.classes || spec.prototypes.cols() != spec.dim) {
    fail("prototypes must be K x d");
  }
  if (spec.sigma.rows() != spec.dim || spec.sigma.cols() != spec.dim) fail("sigma must be d x d");
  if ((spec.sigma - spec.sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9) fail("sigma not symmetric");
  if (Eigen::LLT<Matrix>(spec.sigma).info() != Eigen::Success) fail("sigma not positive definite");
  if (spec.pi_true.size() != spec.classes || !detail::on_simplex(spec.pi_true)) {
    fail("pi_true must be a length-K probability vector");
  }
  if (spec.beta_true &&
      (spec.beta_true->size() != spec.classes || !detail::on_simplex(*spec.beta_true))) {
    fail("beta_true must be a length-K probability vector");
  }
}

inline Sample sample_mixture(const MixtureSpec& spec) {
  validate(spec);
  const Matrix chol = Eigen::LLT<Matrix>(spec.sigma).matrixL();

  Vector cdf(spec.classes);
  double running = 0.0;
  for (Index j = 0; j < spec.classes; ++j) cdf(j) = (running += spec.pi_true(j));

  random::Stream label_rng(spec.seed, 0);
  std::vector<random::Stream> noise_rng;
  noise_rng.reserve(static_cast<std::size_t>(spec.classes));
  for (Index j = 0; j < spec.classes; ++j) {
    noise_rng.emplace_back(spec.seed, static_cast<std::uint64_t>(1 + j));
  }

  Sample out;
  out.embeddings.data.resize(spec.samples, spec.dim);
  out.labels.labels.resize(static_cast<std::size_t>(spec.samples));
  Vector g(spec.dim);
  for (Index i = 0; i < spec.samples; ++i) {
    const double u = label_rng.uniform() * running;
    Index label = 0;
    while (label + 1 < spec.classes && (u >= cdf(label) || spec.pi_true(label) == 0.0)) ++label;
    auto& rng = noise_rng[static_cast<std::size_t>(label)];
    for (Index k = 0; k < spec.dim; ++k) g(k) = rng.normal();
    out.embeddings.data.row(i) = spec.prototypes.row(label) + (chol * g).transpose();
    out.labels.labels[static_cast<std::size_t>(i)] = label;
  }
  return out;
}

/// Bayes log-posterior scores under prior beta_true, up to a per-row constant:
/// -1/2 (x - z_j)^T Sigma^{-1} (x - z_j) + ln beta_j.
inline LogitMatrix biased_logits(const EmbeddingSet& embeddings, const MixtureSpec& spec) {
  if (!spec.beta_true) throw Error(ErrorCode::kMissingBeta, "spec has no beta_true");
  frolic::detail::require_same_dim(embeddings.dim(), spec.dim, "embedding dim vs spec dim");
  Eigen::LLT<Matrix> llt(spec.sigma);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::kInvalidSpec, "sigma not positive definite");
  const Matrix l = llt.matrixL();

  LogitMatrix out{Matrix(embeddings.rows(), spec.classes)};
  Vector diff(spec.dim);
  for (Index i = 0; i < embeddings.rows(); ++i) {
    for (Index j = 0; j < spec.classes; ++j) {
      diff = (embeddings.data.row(i) - spec.prototypes.row(j)).transpose();
      const Vector whitened = l.triangularView<Eigen::Lower>().solve(diff);
      out.scores(i, j) = -0.5 * whitened.squaredNorm() + std::log((*spec.beta_true)(j));
    }
  }
  return out;
}

/// Well-separated or overlapping classes: orthonormal prototypes scaled by
/// `separation`, a random covariance with eigenvalues in [eig_lo, eig_hi],
/// uniform pi_true.
struct IsotropicPrototypeParams {
  Index classes = 3;
  Index dim = 4;
  Index samples = 20000;
  double separation = 1.0;
  double eig_lo = 0.2;
  double eig_hi = 2.0;
};

inline MixtureSpec make_mixture_spec(const IsotropicPrototypeParams& p, std::uint64_t seed,
                                     std::optional<Vector> beta_true = std::nullopt) {
  MixtureSpec spec;
  spec.classes = p.classes;
  spec.dim = p.dim;
  spec.samples = p.samples;
  spec.prototypes = p.separation * orthonormal_rows(p.classes, p.dim, random::stream_seed(seed, 101));
  spec.sigma = random_covariance(p.dim, p.eig_lo, p.eig_hi, random::stream_seed(seed, 102));
  spec.pi_true = uniform_prior(p.classes);
  spec.beta_true = std::move(beta_true);
  spec.seed = seed;
  return spec;
}

/// Embedding-like geometry with a planted zero-shot label bias.
///
/// Prototypes share one dominant direction u: z_j = a_j u + class_scale e_j,
/// with the e_j orthonormal and orthogonal to u. The shared coefficient is
/// a_j = a + tau_c (ln beta_j - mean ln beta) / a, a = sqrt(1 - class_scale^2),
/// so the cosine score z_j^T x of a sample near the shared direction carries
/// an additive tau_c ln beta_j term. Features are x ~ N(z_y, noise^2 S) with S
/// a random covariance over [eig_lo, eig_hi]; classes are balanced.
struct ContaminatedParams {
  Index classes = 10;
  Index dim = 200;
  Index samples = 800;
  double class_scale = 0.15;
  double noise = 0.06;
  double eig_lo = 0.2;
  double eig_hi = 3.0;
  double log_prior_spread = 0.8;
  double tau_c = 0.01;
};

inline MixtureSpec make_contaminated_spec(const ContaminatedParams& p, std::uint64_t seed,
                                          std::optional<Vector> beta_true = std::nullopt) {
  if (p.classes + 1 > p.dim) throw Error(ErrorCode::kInvalidSpec, "need dim > classes");
  const Matrix basis = orthonormal_rows(p.classes + 1, p.dim, random::stream_seed(seed, 101));
  const Vector beta = beta_true ? *beta_true
                                : random_prior(p.classes, p.log_prior_spread,
                                               random::stream_seed(seed, 103));
  const Vector log_beta = beta.array().max(1e-300).log().matrix();
  const double mean_log = log_beta.mean();
  const double a = std::sqrt(1.0 - p.class_scale * p.class_scale);

  MixtureSpec spec;
  spec.classes = p.classes;
  spec.dim = p.dim;
  spec.samples = p.samples;
  spec.prototypes.resize(p.classes, p.dim);
  for (Index j = 0; j < p.classes; ++j) {
    const double shared = a + p.tau_c * (log_beta(j) - mean_log) / a;
    spec.prototypes.row(j) = shared * basis.row(p.classes) + p.class_scale * basis.row(j);
  }
  spec.sigma = (p.noise * p.noise) *
               random_covariance(p.dim, p.eig_lo, p.eig_hi, random::stream_seed(seed, 102));
  spec.pi_true = uniform_prior(p.classes);
  spec.beta_true = beta;
  spec.seed = seed;
  return spec;
}

}  // namespace frolic::synth
