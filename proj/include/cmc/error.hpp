#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmc {

enum class ErrorKind {
  OffCircle,
  NearSingularLoop,
  NoConvergence,
  NotInBigCell,
  StructureViolation,
  OutOfDomain,
  SingularCenter,
  ParseError,
  NonRegularCurve,
  InvalidData,
  FrameDiscontinuity,
  RegularityLoss,
  StepFailure,
  NonUnitaryFrame,
  GridTooCoarse,
  UnknownExample,
  ConfigError,
  VerificationFailure,
};

std::string_view to_string(ErrorKind kind);

/// Every module reports failures through this exception. `where` carries an
/// optional location annotation (grid node, sample point) added by callers.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Error(ErrorKind kind, const std::string& message, std::string where)
      : std::runtime_error(message), kind_(kind), where_(std::move(where)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& where() const noexcept { return where_; }

  Error annotated(std::string where) const { return Error(kind_, what(), std::move(where)); }

 private:
  ErrorKind kind_;
  std::string where_;
};

}  // namespace cmc
