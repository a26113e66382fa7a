#pragma once

// Confidence-matched fusion of the base and Gaussian scorers.

#include <cmath>
#include <limits>

#include "frolic/error.hpp"
#include "frolic/types.hpp"

namespace frolic::fusion {

inline constexpr double kDefaultTauC = 0.01;

struct SearchOptions {
  double tau_min = 1e-4;
  double tau_max = 1e4;
  double tolerance = 1e-4;
  int max_steps = 100;
};

struct TemperaturePair {
  double tau_c = kDefaultTauC;
  double tau_g = 1.0;
  double achieved_gap = 0.0;
  int steps = 0;
  bool boundary_hit = false;
};

namespace detail {

inline void require_finite_logits(const LogitMatrix& logits) {
  frolic::detail::require_finite(logits.scores, ErrorCode::kNonFiniteLogits, "logits");
}

}  // namespace detail

/// Mean over rows of the largest softmax(row / tau) probability.
/// Always evaluated in binary64 with per-row max subtraction.
inline double average_confidence(const LogitMatrix& logits, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::kNonPositiveTemperature, "tau must be > 0");
  if (logits.rows() == 0) throw Error(ErrorCode::kEmptyInput, "no logits");
  const Matrix& s = logits.scores;
  double total = 0.0;
  for (Index i = 0; i < s.rows(); ++i) {
    const double top = s.row(i).maxCoeff();
    double denom = 0.0;
    for (Index j = 0; j < s.cols(); ++j) denom += std::exp((s(i, j) - top) / tau);
    total += 1.0 / denom;
  }
  return total / static_cast<double>(s.rows());
}

/// Finds tau_g with average_confidence(logits_g, tau_g) == target_conf by
/// bisection on log(tau). Confidence is non-increasing in tau, so the
/// bracket is valid whenever the target lies between the endpoint values.
inline TemperaturePair match_confidence(const LogitMatrix& logits_g, double target_conf,
                                        const SearchOptions& options = {},
                                        double tau_c = kDefaultTauC) {
  detail::require_finite_logits(logits_g);
  const double k = static_cast<double>(logits_g.classes());
  // A very confident base scorer rounds to exactly 1 (and constant rows to
  // exactly 1/K), so the closed interval is accepted here; the endpoint
  // checks below decide whether such a target is reachable.
  if (!(target_conf >= 1.0 / k) || !(target_conf <= 1.0)) {
    throw Error(ErrorCode::kUnreachableTarget,
                "target confidence " + std::to_string(target_conf) + " outside [1/K, 1]");
  }

  TemperaturePair out;
  out.tau_c = tau_c;

  double lo = std::log(options.tau_min);
  double hi = std::log(options.tau_max);
  const double conf_lo = average_confidence(logits_g, options.tau_min);
  const double conf_hi = average_confidence(logits_g, options.tau_max);
  auto at_boundary = [&](double tau, double conf) {
    out.tau_g = tau;
    out.achieved_gap = std::abs(conf - target_conf);
    out.boundary_hit = true;
    return out;
  };
  if (conf_lo < target_conf) {
    if (target_conf - conf_lo <= options.tolerance) return at_boundary(options.tau_min, conf_lo);
    throw Error(ErrorCode::kUnreachableTarget,
                "confidence at tau_min is " + std::to_string(conf_lo) + ", below target");
  }
  if (conf_hi > target_conf) {
    if (conf_hi - target_conf <= options.tolerance) return at_boundary(options.tau_max, conf_hi);
    throw Error(ErrorCode::kUnreachableTarget,
                "confidence at tau_max is " + std::to_string(conf_hi) + ", above target");
  }

  double best_tau = options.tau_min;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int step = 1; step <= options.max_steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    const double tau = std::exp(mid);
    const double conf = average_confidence(logits_g, tau);
    const double gap = std::abs(conf - target_conf);
    out.steps = step;
    if (gap < best_gap) {
      best_gap = gap;
      best_tau = tau;
    }
    if (gap <= options.tolerance) break;
    if (conf > target_conf) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.tau_g = best_tau;
  out.achieved_gap = best_gap;
  return out;
}

/// f_f = f_g / tau_g + f_c / tau_c
inline LogitMatrix fuse_logits(const LogitMatrix& logits_c, const LogitMatrix& logits_g,
                               const TemperaturePair& temps) {
  if (logits_c.rows() != logits_g.rows() || logits_c.classes() != logits_g.classes()) {
    throw Error(ErrorCode::kShapeMismatch, "base and Gaussian logits differ in shape");
  }
  if (!(temps.tau_c > 0.0) || !(temps.tau_g > 0.0)) {
    throw Error(ErrorCode::kNonPositiveTemperature, "temperatures must be > 0");
  }
  return {logits_g.scores / temps.tau_g + logits_c.scores / temps.tau_c};
}

}  // namespace frolic::fusion
