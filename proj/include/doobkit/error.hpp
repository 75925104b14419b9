#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace doobkit {

enum class ErrorCode {
  // core_space
  NonRefining,
  BadCover,
  TrivialRootMissing,
  ShapeMismatch,
  BadMeasure,
  DuplicateExtreme,
  BadWeights,
  LengthMismatch,
  // regularity
  NotSupermartingale,
  NotLocallyRegular,
  PreconditionFailed,
  // claims_audit
  ClaimPreconditionUnmet,
  BadBudget,
  UnknownClaim,
  // pricing
  NotMeasurable,
  GeneratorNotInA0,
  BadBounds,
  FamilyNotEmm,
  NotRepresentable,
  Infeasible,
  // lp_solver
  NumericalBreakdown,
  // scenario files
  Schema,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for every domain error; `code()` is the stable part.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace doobkit
