#include "lsqflow/error.hpp"

namespace lsqflow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::InvalidNode: return "InvalidNode";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::TooSmall: return "TooSmall";
    case ErrorKind::NotCharacterized: return "NotCharacterized";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
    case ErrorKind::NoStableModes: return "NoStableModes";
    case ErrorKind::ConditionViolated: return "ConditionViolated";
    case ErrorKind::EquilibriumInfeasible: return "EquilibriumInfeasible";
    case ErrorKind::StepAlignment: return "StepAlignment";
    case ErrorKind::NothingToPlot: return "NothingToPlot";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

RankDeficientError::RankDeficientError(int rank, int expected)
    : Error(ErrorKind::RankDeficient, "matrix has numerical rank " + std::to_string(rank) +
                                          ", expected " + std::to_string(expected)),
      rank_(rank) {}

}  // namespace lsqflow
