#pragma once

// Label-bias correction from unlabeled data.
//
// A scorer trained under class prior beta has softmax outputs s(x) whose
// class-conditional means s_j = E[s(x) | Y = j] form a column-stochastic
// matrix S with S beta = beta. Ground-truth classes are unknown, so the
// grouping uses pseudo-labels from the current debiased scorer and the
// estimate is refined until beta stops moving.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "frolic/error.hpp"
#include "frolic/types.hpp"

namespace frolic::debias {

inline constexpr double kBetaFloor = 1e-8;
inline constexpr double kDefaultEpsilon = 0.01;

struct SoftConfusion {
  Matrix s;                    // column j = mean probability vector of group j
  std::vector<Index> counts;   // group sizes
  std::vector<Index> empty;    // groups with no members (column set to 1/K)
};

struct PowerOptions {
  double tolerance = 1e-10;
  int max_steps = 10000;
  // Accepted fixed-point residual ||S b - b||_1 when max_steps is reached.
  double stall_residual = 1e-5;
};

struct PowerResult {
  Vector beta;
  int steps = 0;
  bool converged = false;
  double residual = 0.0;  // ||S beta - beta||_1
};

enum class BetaUpdate {
  // Softmax and grouping both come from the current debiased scorer; the
  // eigenvector of that S is the prior still left in it and is folded into
  // beta multiplicatively. Stable; default.
  kResidual,
  // Softmax from the fused scorer, grouping from the debiased scorer, beta
  // replaced by the eigenvector each round.
  kRegroup,
};

struct BetaOptions {
  double epsilon = kDefaultEpsilon;
  int max_outer = 100;
  PowerOptions power;
  BetaUpdate update = BetaUpdate::kResidual;
  // Downstream class prior; uniform when empty.
  std::optional<Vector> pi;
};

struct PriorEstimate {
  Vector beta;
  int iterations_outer = 0;
  int iterations_power = 0;
  std::vector<double> l1_trajectory;
  SoftConfusion final_confusion;
  Vector final_eigenvector;
  double fixed_point_residual = 0.0;
  bool converged = false;
  bool power_stalled = false;
  bool degenerate = false;
};

struct AdjustedLogits {
  LogitMatrix logits;
  Index floored = 0;  // beta entries raised to kBetaFloor
};

inline Matrix softmax_rows(const LogitMatrix& logits) {
  frolic::detail::require_finite(logits.scores, ErrorCode::kNonFiniteLogits, "logits");
  const Matrix& s = logits.scores;
  Matrix p(s.rows(), s.cols());
  for (Index i = 0; i < s.rows(); ++i) {
    const double top = s.row(i).maxCoeff();
    double denom = 0.0;
    for (Index j = 0; j < s.cols(); ++j) {
      p(i, j) = std::exp(s(i, j) - top);
      denom += p(i, j);
    }
    p.row(i) /= denom;
  }
  return p;
}

inline SoftConfusion estimate_soft_confusion(const Matrix& probs,
                                             const std::vector<Index>& pseudo_labels) {
  const Index k = probs.cols();
  if (static_cast<Index>(pseudo_labels.size()) != probs.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "pseudo-label count differs from probability rows");
  }
  SoftConfusion out;
  out.s = Matrix::Zero(k, k);
  out.counts.assign(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < probs.rows(); ++i) {
    const Index j = pseudo_labels[static_cast<std::size_t>(i)];
    if (j < 0 || j >= k) throw Error(ErrorCode::kInvalidLabel, "pseudo-label out of range");
    out.s.col(j) += probs.row(i).transpose();
    ++out.counts[static_cast<std::size_t>(j)];
  }
  for (Index j = 0; j < k; ++j) {
    const Index count = out.counts[static_cast<std::size_t>(j)];
    if (count == 0) {
      out.s.col(j).setConstant(1.0 / static_cast<double>(k));
      out.empty.push_back(j);
    } else {
      out.s.col(j) /= static_cast<double>(count);
    }
  }
  return out;
}

/// beta_t = S beta_{t-1} / ||S beta_{t-1}||_1 until the l1 step is below
/// the tolerance.
inline PowerResult solve_beta_power(const Matrix& s, const Vector& beta_init,
                                    const PowerOptions& options = {}) {
  if (s.rows() != s.cols() || s.rows() != beta_init.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "S must be K x K and match beta");
  }
  if ((beta_init.array() < 0.0).any() || !(beta_init.sum() > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "initial beta must be nonnegative and nonzero");
  }
  PowerResult out;
  Vector beta = beta_init / beta_init.sum();
  Vector next(beta.size());
  double delta = 0.0;
  for (int step = 1; step <= options.max_steps; ++step) {
    next.noalias() = s * beta;
    next /= next.sum();
    delta = (next - beta).lpNorm<1>();
    beta.swap(next);
    out.steps = step;
    if (delta < options.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.residual = (s * beta - beta).lpNorm<1>();
  if (!out.converged && out.residual > options.stall_residual) {
    throw Error(ErrorCode::kPowerIterationDiverged,
                "no convergence after " + std::to_string(options.max_steps) +
                    " steps; last l1 step " + std::to_string(delta));
  }
  out.beta = std::move(beta);
  return out;
}

inline PowerResult solve_beta_power(const SoftConfusion& s, const Vector& beta_init,
                                    const PowerOptions& options = {}) {
  return solve_beta_power(s.s, beta_init, options);
}

/// f_d = f - ln(beta) [+ ln(pi)], with beta floored at 1e-8.
inline AdjustedLogits adjust_logits(const LogitMatrix& logits, const Vector& beta,
                                    const std::optional<Vector>& pi = std::nullopt) {
  if (beta.size() != logits.classes()) {
    throw Error(ErrorCode::kDimensionMismatch, "beta length differs from class count");
  }
  AdjustedLogits out;
  Vector shift(beta.size());
  for (Index j = 0; j < beta.size(); ++j) {
    double b = beta(j);
    if (!(b >= kBetaFloor)) {
      b = kBetaFloor;
      ++out.floored;
    }
    shift(j) = -std::log(b);
  }
  if (pi) {
    if (pi->size() != beta.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "pi length differs from class count");
    }
    for (Index j = 0; j < pi->size(); ++j) shift(j) += std::log(std::max((*pi)(j), kBetaFloor));
  }
  out.logits.scores = logits.scores;
  out.logits.scores.rowwise() += shift.transpose();
  return out;
}

/// Iterative pre-training prior estimate. Starts from the uniform prior and
/// the fused scorer's own pseudo-labels; stops once ||beta^t - beta^{t-1}||_1
/// drops below epsilon.
inline PriorEstimate estimate_beta_iterative(const LogitMatrix& logits_f,
                                             const BetaOptions& options = {}) {
  if (!(options.epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  if (logits_f.rows() == 0) throw Error(ErrorCode::kEmptyInput, "no logits");
  const Index k = logits_f.classes();
  const Vector pi = options.pi.value_or(uniform_prior(k));
  if (pi.size() != k) throw Error(ErrorCode::kDimensionMismatch, "pi length differs from K");

  PriorEstimate out;
  Vector beta = uniform_prior(k);

  const Matrix fused_probs = softmax_rows(logits_f);
  SoftConfusion confusion = estimate_soft_confusion(fused_probs, argmax_rows(logits_f));

  for (int t = 1; t <= options.max_outer; ++t) {
    Vector next;
    PowerResult solved;
    if (options.update == BetaUpdate::kRegroup) {
      solved = solve_beta_power(confusion, beta, options.power);
      next = solved.beta;
    } else {
      if (t > 1) {
        const auto current = adjust_logits(logits_f, beta, options.pi).logits;
        confusion = estimate_soft_confusion(softmax_rows(current), argmax_rows(current));
      }
      solved = solve_beta_power(confusion, uniform_prior(k), options.power);
      next = beta.cwiseProduct(solved.beta).cwiseQuotient(pi.cwiseMax(kBetaFloor));
      next /= next.sum();
    }
    out.iterations_power += solved.steps;
    out.power_stalled = out.power_stalled || !solved.converged;
    out.final_confusion = confusion;
    out.final_eigenvector = solved.beta;
    out.fixed_point_residual = solved.residual;

    const double delta = (next - beta).lpNorm<1>();
    out.l1_trajectory.push_back(delta);
    beta = std::move(next);
    out.iterations_outer = t;

    if (options.update == BetaUpdate::kRegroup) {
      const auto current = adjust_logits(logits_f, beta, options.pi).logits;
      confusion = estimate_soft_confusion(fused_probs, argmax_rows(current));
    }
    if (delta < options.epsilon) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    throw Error(ErrorCode::kOuterLoopDiverged,
                "beta still moving after " + std::to_string(options.max_outer) + " outer steps")
        .with_trajectory(out.l1_trajectory);
  }
  out.beta = std::move(beta);
  out.degenerate = !out.final_confusion.empty.empty() || logits_f.rows() < k;
  return out;
}

/// Prior as the mean predicted distribution over the data.
inline Vector implicit_prior(const Matrix& probs) {
  if (probs.rows() == 0) throw Error(ErrorCode::kEmptyInput, "no probabilities");
  Vector sum = Vector::Zero(probs.cols());
  for (Index i = 0; i < probs.rows(); ++i) sum += probs.row(i).transpose();
  return sum / static_cast<double>(probs.rows());
}

/// Removes each row's component along the mean row.
inline EmbeddingSet tde_project(const EmbeddingSet& embeddings) {
  if (embeddings.rows() == 0) throw Error(ErrorCode::kEmptyInput, "no embeddings");
  const Vector mean = embeddings.data.colwise().mean().transpose();
  const double norm2 = mean.squaredNorm();
  if (!(norm2 > 0.0)) throw Error(ErrorCode::kZeroMean, "mean embedding is zero");
  EmbeddingSet out{embeddings.data, false};
  for (Index i = 0; i < out.rows(); ++i) {
    const double coef = out.data.row(i).dot(mean) / norm2;
    out.data.row(i) -= coef * mean.transpose();
  }
  return out;
}

}  // namespace frolic::debias
