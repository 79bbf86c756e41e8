#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sage {

enum class ErrorCode {
  EmptyInput,
  DuplicateEntry,
  OutOfRange,
  NonDivisorParallelism,
  InvariantViolation,
  ObjectiveIncompatible,
  IncompleteMapping,
  ControlMismatch,
  InstanceTooLarge,
  RepairBudgetExhausted,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DuplicateEntry: return "DuplicateEntry";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NonDivisorParallelism: return "NonDivisorParallelism";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::ObjectiveIncompatible: return "ObjectiveIncompatible";
    case ErrorCode::IncompleteMapping: return "IncompleteMapping";
    case ErrorCode::ControlMismatch: return "ControlMismatch";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::RepairBudgetExhausted: return "RepairBudgetExhausted";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library. `details()` carries the numeric
/// payload of the error (the duplicated index, the missing data, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::vector<std::size_t> details = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::size_t>& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  std::vector<std::size_t> details_;
};

}  // namespace sage
