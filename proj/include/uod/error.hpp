#pragma once

#include <stdexcept>
#include <string>

namespace uod {

enum class ErrorKind {
  ShapeMismatch,
  NotAComplex,
  NotAChainMap,
  NonCommutingOperators,
  OrderViolation,
  PlusMinusNotZero,
  WindowTooSmall,
  QuotientNotFree,
  NotDivisible,
  LevelMismatch,
  OrderMismatch,
  NotSquarefree,
  InducedOperatorUndefined,
  BasisCertificateFailed,
  StructureViolation,
  RankZeroUnsupported,
  HypothesisViolated,
  RationalityFailure,
  RankMismatch,
  RelationNotKilled,
  InconsistentSystem,
  ParseError,
  InvalidArgument,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotAComplex: return "NotAComplex";
    case ErrorKind::NotAChainMap: return "NotAChainMap";
    case ErrorKind::NonCommutingOperators: return "NonCommutingOperators";
    case ErrorKind::OrderViolation: return "OrderViolation";
    case ErrorKind::PlusMinusNotZero: return "PlusMinusNotZero";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::QuotientNotFree: return "QuotientNotFree";
    case ErrorKind::NotDivisible: return "NotDivisible";
    case ErrorKind::LevelMismatch: return "LevelMismatch";
    case ErrorKind::OrderMismatch: return "OrderMismatch";
    case ErrorKind::NotSquarefree: return "NotSquarefree";
    case ErrorKind::InducedOperatorUndefined: return "InducedOperatorUndefined";
    case ErrorKind::BasisCertificateFailed: return "BasisCertificateFailed";
    case ErrorKind::StructureViolation: return "StructureViolation";
    case ErrorKind::RankZeroUnsupported: return "RankZeroUnsupported";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::RationalityFailure: return "RationalityFailure";
    case ErrorKind::RankMismatch: return "RankMismatch";
    case ErrorKind::RelationNotKilled: return "RelationNotKilled";
    case ErrorKind::InconsistentSystem: return "InconsistentSystem";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Library error. `kind()` identifies the failed contract; `what()` carries detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for kinds that can only arise from an internal bug rather than bad input.
  bool is_internal() const noexcept {
    switch (kind_) {
      case ErrorKind::InducedOperatorUndefined:
      case ErrorKind::BasisCertificateFailed:
      case ErrorKind::StructureViolation:
      case ErrorKind::RationalityFailure:
      case ErrorKind::RankMismatch:
      case ErrorKind::RelationNotKilled:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

}  // namespace uod
