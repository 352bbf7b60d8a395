#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rgds {

enum class ErrorKind {
  MalformedSpec,
  NotContracting,
  SeedNotInvariant,
  ShapeMismatch,
  UnknownEdge,
  OracleTooLarge,
  BadEpsilon,
  PrefixTooShort,
  DeadVector,
  BracketFailure,
  NotUSSC,
  FamilyTooLarge,
  NotSurviving,
  DepthBudget,
  BudgetExceeded,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Numeric failures map to exit code 3 in the CLI, everything else to 2.
bool is_numeric_failure(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rgds
