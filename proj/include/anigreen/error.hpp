#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace anigreen {

enum class ErrorCode {
  NonPositiveEigenvalue,
  NotSymmetric,
  NotPositiveDefinite,
  NotClosed,
  WrongOrientation,
  DegenerateFace,
  PointNotOnFace,
  DegenerateSourceFace,
  SingularMatrix,
  CoincidentPoints,
  SingularConfiguration,
  NoConvergence,
  PointOutsideOrOnBoundary,
  ConnectivityMismatch,
  NoValidSamples,
  SingularSystem,
  ParseError,
  UnknownSession,
  NumericalFailure,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Numerical failures map to exit status 2 in the CLI and 500 in the service;
// everything else is a validation failure.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::vector<std::size_t> indices = {})
      : std::runtime_error(message), code_(code), indices_(std::move(indices)) {}

  ErrorCode code() const noexcept { return code_; }
  // Offending element indices (points, faces, ...) when the error refers to some.
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  ErrorCode code_;
  std::vector<std::size_t> indices_;
};

}  // namespace anigreen
