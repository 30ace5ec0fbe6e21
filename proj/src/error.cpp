#include "anigreen/error.hpp"

namespace anigreen {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveEigenvalue: return "NonPositiveEigenvalue";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::WrongOrientation: return "WrongOrientation";
    case ErrorCode::DegenerateFace: return "DegenerateFace";
    case ErrorCode::PointNotOnFace: return "PointNotOnFace";
    case ErrorCode::DegenerateSourceFace: return "DegenerateSourceFace";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::SingularConfiguration: return "SingularConfiguration";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PointOutsideOrOnBoundary: return "PointOutsideOrOnBoundary";
    case ErrorCode::ConnectivityMismatch: return "ConnectivityMismatch";
    case ErrorCode::NoValidSamples: return "NoValidSamples";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularConfiguration:
    case ErrorCode::NoConvergence:
    case ErrorCode::SingularSystem:
    case ErrorCode::NumericalFailure:
    case ErrorCode::CoincidentPoints:
      return true;
    default:
      return false;
  }
}

}  // namespace anigreen
