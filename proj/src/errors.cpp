#include "hclab/errors.hpp"

namespace hclab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NotContained: return "NotContained";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ZeroWeight: return "ZeroWeight";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NotProjection: return "NotProjection";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::NotLeftInvertible: return "NotLeftInvertible";
    case ErrorKind::WindowExhausted: return "WindowExhausted";
    case ErrorKind::EmptyKernel: return "EmptyKernel";
    case ErrorKind::NotInjectiveOnWindow: return "NotInjectiveOnWindow";
    case ErrorKind::NotHalfCentered: return "NotHalfCentered";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::ModuliTooSmall: return "ModuliTooSmall";
    case ErrorKind::NoNonzeroBeta: return "NoNonzeroBeta";
    case ErrorKind::NoRelationFound: return "NoRelationFound";
    case ErrorKind::DegenerateTriples: return "DegenerateTriples";
    case ErrorKind::NotSingleTriple: return "NotSingleTriple";
    case ErrorKind::PatternResidualTooLarge: return "PatternResidualTooLarge";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::Inconclusive: return "Inconclusive";
    case ErrorKind::SpecParse: return "SpecParse";
  }
  return "Unknown";
}

FailureClass failure_class(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SpecParse:
      return FailureClass::Parse;
    case ErrorKind::NotHermitian:
    case ErrorKind::NonFinite:
    case ErrorKind::NotPSD:
    case ErrorKind::NotContained:
    case ErrorKind::NotCommuting:
    case ErrorKind::DegenerateTriples:
    case ErrorKind::PatternResidualTooLarge:
    case ErrorKind::NoRelationFound:
      return FailureClass::Numerical;
    case ErrorKind::Inconclusive:
      return FailureClass::Inconclusive;
    default:
      return FailureClass::Precondition;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace hclab
