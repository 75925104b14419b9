#include "doobkit/error.hpp"

namespace doobkit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonRefining: return "NonRefining";
    case ErrorCode::BadCover: return "BadCover";
    case ErrorCode::TrivialRootMissing: return "TrivialRootMissing";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::BadMeasure: return "BadMeasure";
    case ErrorCode::DuplicateExtreme: return "DuplicateExtreme";
    case ErrorCode::BadWeights: return "BadWeights";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotSupermartingale: return "NotSupermartingale";
    case ErrorCode::NotLocallyRegular: return "NotLocallyRegular";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::ClaimPreconditionUnmet: return "ClaimPreconditionUnmet";
    case ErrorCode::BadBudget: return "BadBudget";
    case ErrorCode::UnknownClaim: return "UnknownClaim";
    case ErrorCode::NotMeasurable: return "NotMeasurable";
    case ErrorCode::GeneratorNotInA0: return "GeneratorNotInA0";
    case ErrorCode::BadBounds: return "BadBounds";
    case ErrorCode::FamilyNotEmm: return "FamilyNotEmm";
    case ErrorCode::NotRepresentable: return "NotRepresentable";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::Schema: return "Schema";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace doobkit
