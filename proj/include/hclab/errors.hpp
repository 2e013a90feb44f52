#pragma once

#include <stdexcept>
#include <string>

namespace hclab {

enum class ErrorKind {
  NotHermitian,
  NonFinite,
  NotPSD,
  EmptyInput,
  NotContained,
  DimensionMismatch,
  InvalidArgument,
  ZeroWeight,
  IndexOutOfRange,
  NotProjection,
  NotPositive,
  NotLeftInvertible,
  WindowExhausted,
  EmptyKernel,
  NotInjectiveOnWindow,
  NotHalfCentered,
  NotCommuting,
  ModuliTooSmall,
  NoNonzeroBeta,
  NoRelationFound,
  DegenerateTriples,
  NotSingleTriple,
  PatternResidualTooLarge,
  PreconditionViolated,
  Inconclusive,
  SpecParse,
};

const char* to_string(ErrorKind kind);

// Failure class used by the CLI exit-code contract.
enum class FailureClass { Parse = 1, Precondition = 2, Numerical = 3, Inconclusive = 4 };

FailureClass failure_class(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace hclab
