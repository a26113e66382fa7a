#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace frolic {

enum class ErrorCode {
  // data errors
  kMagicMismatch,
  kInvalidHeader,
  kTruncatedFile,
  kNonFiniteEntry,
  kIoFailure,
  kZeroRow,
  kEmptyInput,
  kDimensionMismatch,
  kShapeMismatch,
  kLengthMismatch,
  kInvalidLabel,
  kInvalidSpec,
  kMissingBeta,
  kZeroMean,
  kNonFiniteLogits,
  kNonPositiveTemperature,
  kInvalidArgument,
  // numerical errors
  kRankDeficientPrototypes,
  kNotPositiveDefinite,
  kUnreachableTarget,
  kPowerIterationDiverged,
  kOuterLoopDiverged,
};

enum class ErrorCategory { kData, kNumerical };

constexpr ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRankDeficientPrototypes:
    case ErrorCode::kNotPositiveDefinite:
    case ErrorCode::kUnreachableTarget:
    case ErrorCode::kPowerIterationDiverged:
    case ErrorCode::kOuterLoopDiverged:
      return ErrorCategory::kNumerical;
    default:
      return ErrorCategory::kData;
  }
}

constexpr const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMagicMismatch: return "MagicMismatch";
    case ErrorCode::kInvalidHeader: return "InvalidHeader";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kNonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kZeroRow: return "ZeroRow";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kMissingBeta: return "MissingBeta";
    case ErrorCode::kZeroMean: return "ZeroMean";
    case ErrorCode::kNonFiniteLogits: return "NonFiniteLogits";
    case ErrorCode::kNonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kRankDeficientPrototypes: return "RankDeficientPrototypes";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kUnreachableTarget: return "UnreachableTarget";
    case ErrorCode::kPowerIterationDiverged: return "PowerIterationDiverged";
    case ErrorCode::kOuterLoopDiverged: return "OuterLoopDiverged";
  }
  return "Unknown";
}

/// Library-wide exception. `stage` is filled in by the pipeline when an
/// error crosses a stage boundary; `trajectory` carries the l1 deltas of
/// an iteration that failed to converge.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }
  const std::string& detail() const noexcept { return detail_; }
  const std::string& stage() const noexcept { return stage_; }
  const std::vector<double>& trajectory() const noexcept { return trajectory_; }

  Error& with_stage(std::string stage) {
    stage_ = std::move(stage);
    return *this;
  }
  Error& with_trajectory(std::vector<double> trajectory) {
    trajectory_ = std::move(trajectory);
    return *this;
  }

 private:
  ErrorCode code_;
  std::string detail_;
  std::string stage_;
  std::vector<double> trajectory_;
};

}  // namespace frolic
