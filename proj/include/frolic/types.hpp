#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "frolic/error.hpp"

namespace frolic {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Unlabeled feature vectors, one per row.
struct EmbeddingSet {
  Matrix data;
  bool normalized = false;

  Index rows() const { return data.rows(); }
  Index dim() const { return data.cols(); }
};

/// Class prototypes (one per row) and their display names.
struct PrototypeSet {
  Matrix data;
  std::vector<std::string> class_names;
  bool normalized = false;

  Index classes() const { return data.rows(); }
  Index dim() const { return data.cols(); }
};

/// Ground-truth class indices. Evaluation and oracles only.
struct LabelSet {
  std::vector<Index> labels;

  std::size_t size() const { return labels.size(); }
};

/// N x K raw class scores.
struct LogitMatrix {
  Matrix scores;

  Index rows() const { return scores.rows(); }
  Index classes() const { return scores.cols(); }
};

namespace detail {

inline void require_finite(const Matrix& m, ErrorCode code, const char* what) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j))) {
        throw Error(code, std::string(what) + " has a non-finite entry at row " +
                              std::to_string(i) + ", col " + std::to_string(j));
      }
    }
  }
}

inline void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace detail

/// Index of the largest entry; the lowest index wins ties.
template <typename Derived>
Index argmax(const Eigen::DenseBase<Derived>& v) {
  Index best = 0;
  for (Index j = 1; j < v.size(); ++j) {
    if (v(j) > v(best)) best = j;
  }
  return best;
}

inline std::vector<Index> argmax_rows(const Matrix& m) {
  std::vector<Index> out(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = argmax(m.row(i));
  return out;
}

inline std::vector<Index> argmax_rows(const LogitMatrix& logits) {
  return argmax_rows(logits.scores);
}

inline Vector uniform_prior(Index k) { return Vector::Constant(k, 1.0 / static_cast<double>(k)); }

}  // namespace frolic
