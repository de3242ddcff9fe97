#pragma once

#include <stdexcept>
#include <string>

namespace graphspec {

enum class ErrorKind {
  InvalidAtom,
  NegativeProduct,
  WeightSum,
  ZeroDegree,
  ThetaTooLarge,
  BadAngle,
  NoConvergence,
  NonPhysicalBranch,
  EmptyBand,
  BracketFailure,
  IterativeNoConvergence,
  BadInput,
  BadConfig,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidAtom: return "InvalidAtom";
    case ErrorKind::NegativeProduct: return "NegativeProduct";
    case ErrorKind::WeightSum: return "WeightSum";
    case ErrorKind::ZeroDegree: return "ZeroDegree";
    case ErrorKind::ThetaTooLarge: return "ThetaTooLarge";
    case ErrorKind::BadAngle: return "BadAngle";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NonPhysicalBranch: return "NonPhysicalBranch";
    case ErrorKind::EmptyBand: return "EmptyBand";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::IterativeNoConvergence: return "IterativeNoConvergence";
    case ErrorKind::BadInput: return "BadInput";
    case ErrorKind::BadConfig: return "BadConfig";
  }
  return "UnknownError";
}

/// Library error carrying a machine-checkable kind plus a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace graphspec
