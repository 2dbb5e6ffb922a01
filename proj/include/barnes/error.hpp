#pragma once

#include <stdexcept>
#include <string>

namespace barnes {

enum class ErrorCode {
  NonPositiveShift,
  NonPositiveWeight,
  EmptyWeights,
  ConflictingDeclaration,
  UnsupportedWeightStructure,
  Overflow,
  SigmaTooSmall,
  NearPole,
  TruncationTooShort,
  InvalidArgument,
  InsufficientCheckpoints,
  BudgetExceeded,
};

const char* to_string(ErrorCode code) noexcept;

/// True for errors caused by exhausting a term or evaluation cap rather than
/// by a bad domain point.
constexpr bool is_budget_error(ErrorCode code) noexcept {
  return code == ErrorCode::BudgetExceeded || code == ErrorCode::Overflow;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace barnes
