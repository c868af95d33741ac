#include "cmc/error.hpp"

namespace cmc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OffCircle: return "OffCircle";
    case ErrorKind::NearSingularLoop: return "NearSingularLoop";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotInBigCell: return "NotInBigCell";
    case ErrorKind::StructureViolation: return "StructureViolation";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::SingularCenter: return "SingularCenter";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NonRegularCurve: return "NonRegularCurve";
    case ErrorKind::InvalidData: return "InvalidData";
    case ErrorKind::FrameDiscontinuity: return "FrameDiscontinuity";
    case ErrorKind::RegularityLoss: return "RegularityLoss";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::NonUnitaryFrame: return "NonUnitaryFrame";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::UnknownExample: return "UnknownExample";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::VerificationFailure: return "VerificationFailure";
  }
  return "Unknown";
}

}  // namespace cmc
