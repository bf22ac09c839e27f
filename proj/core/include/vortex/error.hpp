#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vortex {

enum class ErrorCode {
  InvalidGeometry,
  MeshTooCoarse,
  NotOnBoundary,
  UnsupportedKind,
  UnsupportedExponent,
  NoConvergence,
  NonPositiveKappa,
  SolverDiverged,
  DimensionMismatch,
  CoincidentPoints,
  OutsideDomain,
  SingularOmegaMatrix,
  FluxImbalance,
  SingularCirculationSystem,
  NoInteriorMaximum,
  VortexCollision,
  BoundaryEscape,
  NoPositivePart,
  NotNonnegative,
  InvalidSpec,
  TrivialCollapse,
  NoSignChange,
  EmptyVorticity,
  InsufficientPoints,
  GapUnderResolved,
  NonPositiveS,
  ModulusOutOfRange,
  GridTooCoarseForCore,
  UndefinedRobin,
  ConfigInvalid,
};

std::string_view to_string(ErrorCode c);

// Errors caused by bad input rather than by a numerical failure.
bool is_validation_error(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace vortex
