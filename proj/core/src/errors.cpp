#include "rgds/errors.hpp"

namespace rgds {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedSpec: return "MalformedSpec";
    case ErrorKind::NotContracting: return "NotContracting";
    case ErrorKind::SeedNotInvariant: return "SeedNotInvariant";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::UnknownEdge: return "UnknownEdge";
    case ErrorKind::OracleTooLarge: return "OracleTooLarge";
    case ErrorKind::BadEpsilon: return "BadEpsilon";
    case ErrorKind::PrefixTooShort: return "PrefixTooShort";
    case ErrorKind::DeadVector: return "DeadVector";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::NotUSSC: return "NotUSSC";
    case ErrorKind::FamilyTooLarge: return "FamilyTooLarge";
    case ErrorKind::NotSurviving: return "NotSurviving";
    case ErrorKind::DepthBudget: return "DepthBudget";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_numeric_failure(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DeadVector:
    case ErrorKind::BracketFailure:
    case ErrorKind::FamilyTooLarge:
    case ErrorKind::DepthBudget:
    case ErrorKind::BudgetExceeded:
    case ErrorKind::OracleTooLarge:
      return true;
    default:
      return false;
  }
}

}  // namespace rgds
