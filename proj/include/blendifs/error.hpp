#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blendifs {

enum class ErrorKind {
  EmptyIfs,
  NotContractive,
  SymbolOutOfRange,
  LambdaOutOfRange,
  EmptyInput,
  BadLength,
  DeltaNonPositive,
  NeedTwoSystems,
  GridMismatch,
  ParseError,
  UnknownIfs,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyIfs: return "EmptyIfs";
    case ErrorKind::NotContractive: return "NotContractive";
    case ErrorKind::SymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorKind::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::BadLength: return "BadLength";
    case ErrorKind::DeltaNonPositive: return "DeltaNonPositive";
    case ErrorKind::NeedTwoSystems: return "NeedTwoSystems";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownIfs: return "UnknownIfs";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. `kind()` is the
/// stable, switchable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by Ifs validation; carries the 0-based offending map index.
class NotContractiveError : public Error {
 public:
  NotContractiveError(std::size_t index, double lambda, const std::string& what)
      : Error(ErrorKind::NotContractive, what), index_(index), lambda_(lambda) {}

  std::size_t index() const noexcept { return index_; }
  double lambda() const noexcept { return lambda_; }

 private:
  std::size_t index_;
  double lambda_;
};

}  // namespace blendifs
