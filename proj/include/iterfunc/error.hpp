#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iterfunc {

/// Every failure the library reports. The CLI maps these onto exit codes via
/// error_category().
enum class ErrorCode {
  // function representation
  OutOfDomain,
  OutOfRange,
  NotMonotone,
  DomainMismatch,
  InvalidGrid,
  // expressions and files
  SyntaxError,
  DiscontinuousSeam,
  GuardOverlap,
  MathDomain,
  SchemaViolation,
  IoError,
  // hypotheses
  HypothesisViolation,
  ParityViolation,
  ZeroSum,
  NonPositiveValues,
  RangeHypothesisViolated,
  // numerics
  NotBracketed,
  NoConvergence,
  CertificateLost,
  SeedRejected,
  AnchorNotApproached,
  NoValidSeeds,
  PieceNotMonotone,
  RangeMismatch,
  NonPositiveIterate,
};

enum class ErrorCategory { Hypothesis, Numerical, Input };

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DiscontinuousSeam: return "DiscontinuousSeam";
    case ErrorCode::GuardOverlap: return "GuardOverlap";
    case ErrorCode::MathDomain: return "MathDomain";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::HypothesisViolation: return "HypothesisViolation";
    case ErrorCode::ParityViolation: return "ParityViolation";
    case ErrorCode::ZeroSum: return "ZeroSum";
    case ErrorCode::NonPositiveValues: return "NonPositiveValues";
    case ErrorCode::RangeHypothesisViolated: return "RangeHypothesisViolated";
    case ErrorCode::NotBracketed: return "NotBracketed";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::CertificateLost: return "CertificateLost";
    case ErrorCode::SeedRejected: return "SeedRejected";
    case ErrorCode::AnchorNotApproached: return "AnchorNotApproached";
    case ErrorCode::NoValidSeeds: return "NoValidSeeds";
    case ErrorCode::PieceNotMonotone: return "PieceNotMonotone";
    case ErrorCode::RangeMismatch: return "RangeMismatch";
    case ErrorCode::NonPositiveIterate: return "NonPositiveIterate";
  }
  return "Unknown";
}

inline ErrorCategory error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::HypothesisViolation:
    case ErrorCode::ParityViolation:
    case ErrorCode::ZeroSum:
    case ErrorCode::NonPositiveValues:
    case ErrorCode::RangeHypothesisViolated:
      return ErrorCategory::Hypothesis;
    case ErrorCode::SyntaxError:
    case ErrorCode::DiscontinuousSeam:
    case ErrorCode::GuardOverlap:
    case ErrorCode::SchemaViolation:
    case ErrorCode::IoError:
      return ErrorCategory::Input;
    default:
      return ErrorCategory::Numerical;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return error_category(code_); }

  /// Pipeline stage that raised the error, empty when raised outside a pipeline.
  const std::string& stage() const noexcept { return stage_; }

  Error with_stage(std::string stage) const {
    Error copy(*this);
    copy.stage_ = std::move(stage);
    return copy;
  }

  /// Offending index for SeedRejected and PieceNotMonotone.
  std::optional<std::size_t> index() const noexcept { return index_; }

  Error with_index(std::size_t index) const {
    Error copy(*this);
    copy.index_ = index;
    return copy;
  }

 private:
  ErrorCode code_;
  std::string stage_;
  std::optional<std::size_t> index_;
};

}  // namespace iterfunc
