#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace contab {

enum class ErrorKind {
  Unbalanced,
  NegativeEntry,
  LengthMismatch,
  TooLarge,
  NotSquare,
  BadMargins,
  DomainViolation,
  NoInterior,
  NotConverged,
  OutOfRange,
  KernelDimensionError,
  NonIntegerAverage,
  DominationViolated,
  BudgetExhausted,
  Infeasible,
  ParseError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for all library failures; `kind()` drives the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace contab
