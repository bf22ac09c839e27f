#include "vortex/error.hpp"

namespace vortex {

std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::MeshTooCoarse: return "MeshTooCoarse";
    case ErrorCode::NotOnBoundary: return "NotOnBoundary";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::UnsupportedExponent: return "UnsupportedExponent";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonPositiveKappa: return "NonPositiveKappa";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::SingularOmegaMatrix: return "SingularOmegaMatrix";
    case ErrorCode::FluxImbalance: return "FluxImbalance";
    case ErrorCode::SingularCirculationSystem: return "SingularCirculationSystem";
    case ErrorCode::NoInteriorMaximum: return "NoInteriorMaximum";
    case ErrorCode::VortexCollision: return "VortexCollision";
    case ErrorCode::BoundaryEscape: return "BoundaryEscape";
    case ErrorCode::NoPositivePart: return "NoPositivePart";
    case ErrorCode::NotNonnegative: return "NotNonnegative";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::TrivialCollapse: return "TrivialCollapse";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::EmptyVorticity: return "EmptyVorticity";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::GapUnderResolved: return "GapUnderResolved";
    case ErrorCode::NonPositiveS: return "NonPositiveS";
    case ErrorCode::ModulusOutOfRange: return "ModulusOutOfRange";
    case ErrorCode::GridTooCoarseForCore: return "GridTooCoarseForCore";
    case ErrorCode::UndefinedRobin: return "UndefinedRobin";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidGeometry:
    case ErrorCode::MeshTooCoarse:
    case ErrorCode::UnsupportedKind:
    case ErrorCode::UnsupportedExponent:
    case ErrorCode::NonPositiveKappa:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidSpec:
    case ErrorCode::GapUnderResolved:
    case ErrorCode::NonPositiveS:
    case ErrorCode::ModulusOutOfRange:
    case ErrorCode::GridTooCoarseForCore:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::NotOnBoundary:
    case ErrorCode::OutsideDomain:
    case ErrorCode::CoincidentPoints:
    case ErrorCode::UndefinedRobin:
    case ErrorCode::FluxImbalance:
      return true;
    default:
      return false;
  }
}

}  // namespace vortex
