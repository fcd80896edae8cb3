#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lsqflow {

enum class ErrorKind {
  RankDeficient,
  InvalidNode,
  InvalidArgument,
  TooSmall,
  NotCharacterized,
  NumericalFailure,
  DimensionMismatch,
  NotApplicable,
  InternalInconsistency,
  NoStableModes,
  ConditionViolated,
  EquilibriumInfeasible,
  StepAlignment,
  NothingToPlot,
  ParseError,
  SchemaError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind is
/// machine-readable and is what the CLI reports in its JSON error envelope.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class RankDeficientError : public Error {
 public:
  RankDeficientError(int rank, int expected);
  [[nodiscard]] int rank() const noexcept { return rank_; }

 private:
  int rank_;
};

}  // namespace lsqflow
