#pragma once

// Label-free Gaussian discriminant head.
//
// The unlabeled features are modelled as a mixture of Gaussians centred on
// the class prototypes with one shared covariance. The second moment of such
// a mixture is Sigma + sum_j pi_j z_j z_j^T, so Sigma can be read off the
// sample second moment once the prototypes and class priors are known.

#include <algorithm>
#include <cmath>
#include <string>

#include "frolic/error.hpp"
#include "frolic/types.hpp"

namespace frolic::gda {

struct MomentEstimate {
  Vector mean;
  Matrix second_moment;
  Index sample_count = 0;
};

enum class PriorSource { kUniform, kMomentSolved, kFile };

struct PriorVectorPi {
  Vector pi;
  PriorSource source = PriorSource::kUniform;
  // Set when a moment-solved pi has negative entries or does not sum to 1.
  bool outside_simplex = false;
};

struct CovarianceOptions {
  // Ridge starts at initial * scale and doubles up to cap * scale, where
  // scale = trace(Sigma) / d (or trace(M) / d when trace(Sigma) <= 0).
  double ridge_initial = 1e-6;
  double ridge_cap = 1e-2;
};

struct SharedCovariance {
  Matrix sigma;
  double ridge = 0.0;
  // True when the ridge cap was not enough and eigenvalues were replaced by
  // max(|lambda|, cap). `negative_eigenvalues` counts the ones that flipped.
  bool repaired = false;
  Index negative_eigenvalues = 0;
};

struct GaussianHead {
  Matrix weights;  // K x d, row j solves Sigma w_j = z_j
  Vector biases;   // b_j = -1/2 z_j^T w_j
};

/// Sample mean and second moment, accumulated row by row in input order so
/// the result is bit-reproducible.
inline MomentEstimate estimate_moments(const EmbeddingSet& embeddings) {
  const Index n = embeddings.rows();
  const Index d = embeddings.dim();
  if (n == 0 || d == 0) throw Error(ErrorCode::kEmptyInput, "no embeddings");

  Vector sum = Vector::Zero(d);
  Matrix outer = Matrix::Zero(d, d);
  Vector x(d);
  for (Index i = 0; i < n; ++i) {
    x = embeddings.data.row(i).transpose();
    sum += x;
    for (Index a = 0; a < d; ++a) {
      const double xa = x(a);
      for (Index b = a; b < d; ++b) outer(b, a) += xa * x(b);
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  MomentEstimate m;
  m.mean = sum * inv_n;
  m.second_moment = Matrix(d, d);
  for (Index a = 0; a < d; ++a) {
    for (Index b = a; b < d; ++b) {
      m.second_moment(b, a) = m.second_moment(a, b) = outer(b, a) * inv_n;
    }
  }
  m.sample_count = n;
  return m;
}

inline PriorVectorPi uniform_pi(Index classes) {
  return {uniform_prior(classes), PriorSource::kUniform, false};
}

/// Least-squares solution of Z^T pi = mu, i.e. pi = (Z Z^T)^{-1} Z mu.
/// Diagnostic only: the result is not projected onto the simplex.
inline PriorVectorPi estimate_pi_from_moments(const PrototypeSet& prototypes, const Vector& mean) {
  const Matrix& z = prototypes.data;
  if (z.rows() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two prototypes");
  frolic::detail::require_same_dim(z.cols(), mean.size(), "prototype dim vs mean");

  const Matrix gram = z * z.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  // cond(Z) = sqrt(cond(Z Z^T))
  if (!(lo > 0.0) || std::sqrt(hi / lo) > 1e8) {
    throw Error(ErrorCode::kRankDeficientPrototypes,
                "prototype condition number exceeds 1e8");
  }
  PriorVectorPi out;
  out.pi = gram.ldlt().solve(z * mean);
  out.source = PriorSource::kMomentSolved;
  out.outside_simplex = (out.pi.array() < 0.0).any() || std::abs(out.pi.sum() - 1.0) > 1e-6;
  return out;
}

namespace detail {

inline bool is_positive_definite(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

}  // namespace detail

/// Sigma = M - sum_j pi_j z_j z_j^T, symmetrized and made positive definite.
inline SharedCovariance estimate_shared_covariance(const MomentEstimate& moments,
                                                   const PrototypeSet& prototypes,
                                                   const PriorVectorPi& pi,
                                                   const CovarianceOptions& options = {}) {
  const Index d = moments.second_moment.rows();
  frolic::detail::require_same_dim(prototypes.dim(), d, "prototype dim vs moment dim");
  frolic::detail::require_same_dim(prototypes.classes(), pi.pi.size(), "classes vs prior length");

  Matrix sigma = moments.second_moment;
  for (Index j = 0; j < prototypes.classes(); ++j) {
    const Vector z = prototypes.data.row(j).transpose();
    sigma.noalias() -= pi.pi(j) * (z * z.transpose());
  }
  sigma = 0.5 * (sigma + sigma.transpose()).eval();

  SharedCovariance out;
  if (detail::is_positive_definite(sigma)) {
    out.sigma = std::move(sigma);
    return out;
  }

  // Unit-norm inputs give trace(Sigma) = 1 - sum_j pi_j |z_j|^2, which is
  // zero up to rounding; fall back to the second moment in that case.
  const double trace_m = moments.second_moment.trace();
  double scale = sigma.trace() / static_cast<double>(d);
  if (!(sigma.trace() > 1e-8 * trace_m)) scale = trace_m / static_cast<double>(d);
  if (!(scale > 0.0)) scale = 1.0;
  const double cap = options.ridge_cap * scale;
  const Matrix identity = Matrix::Identity(d, d);
  for (double ridge = options.ridge_initial * scale; ridge <= cap; ridge *= 2.0) {
    Matrix candidate = sigma + ridge * identity;
    if (detail::is_positive_definite(candidate)) {
      out.sigma = std::move(candidate);
      out.ridge = ridge;
      return out;
    }
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotPositiveDefinite, "eigendecomposition of covariance failed");
  }
  Vector values = eig.eigenvalues();
  const double floor = std::max(cap, 1e-12 * values.cwiseAbs().maxCoeff());
  for (Index i = 0; i < values.size(); ++i) {
    if (values(i) < 0.0) ++out.negative_eigenvalues;
    values(i) = std::max(std::abs(values(i)), floor);
  }
  out.sigma = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
  out.ridge = 0.0;
  out.repaired = true;
  if (!detail::is_positive_definite(out.sigma)) {
    throw Error(ErrorCode::kNotPositiveDefinite, "covariance repair did not yield an SPD matrix");
  }
  return out;
}

inline GaussianHead build_gaussian_head(const SharedCovariance& sigma,
                                        const PrototypeSet& prototypes) {
  frolic::detail::require_same_dim(prototypes.dim(), sigma.sigma.rows(),
                                   "prototype dim vs covariance dim");
  Eigen::LLT<Matrix> llt(sigma.sigma);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotPositiveDefinite, "Cholesky factorization failed");
  }
  GaussianHead head;
  head.weights = llt.solve(prototypes.data.transpose()).transpose();
  head.biases = -0.5 * (prototypes.data.array() * head.weights.array()).rowwise().sum().matrix();
  return head;
}

inline LogitMatrix score_gaussian(const GaussianHead& head, const EmbeddingSet& embeddings) {
  if (embeddings.rows() == 0) throw Error(ErrorCode::kEmptyInput, "no embeddings to score");
  frolic::detail::require_same_dim(embeddings.dim(), head.weights.cols(),
                                   "embedding dim vs head dim");
  LogitMatrix out;
  out.scores = embeddings.data * head.weights.transpose();
  out.scores.rowwise() += head.biases.transpose();
  return out;
}

/// Cosine-prototype scores z_j^T x.
inline LogitMatrix score_base(const PrototypeSet& prototypes, const EmbeddingSet& embeddings) {
  if (embeddings.rows() == 0) throw Error(ErrorCode::kEmptyInput, "no embeddings to score");
  frolic::detail::require_same_dim(embeddings.dim(), prototypes.dim(),
                                   "embedding dim vs prototype dim");
  return {embeddings.data * prototypes.data.transpose()};
}

}  // namespace frolic::gda
