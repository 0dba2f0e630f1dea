#include "core/error.hpp"

namespace dtlab {

const char* err_name(Err e) {
  switch (e) {
    case Err::InvalidArgument: return "InvalidArgument";
    case Err::Domain: return "DomainError";
    case Err::InconsistentRange: return "InconsistentRange";
    case Err::Classification: return "ClassificationError";
    case Err::Normalization: return "NormalizationError";
    case Err::Quadrature: return "QuadratureError";
    case Err::AsymmetricInput: return "AsymmetricInput";
    case Err::Ellipticity: return "EllipticityError";
    case Err::Range: return "RangeError";
    case Err::Convergence: return "ConvergenceError";
    case Err::InvalidBound: return "InvalidBound";
    case Err::Extension: return "ExtensionError";
    case Err::DegenerateCoefficients: return "DegenerateCoefficients";
    case Err::Monotonicity: return "MonotonicityError";
    case Err::RangeViolation: return "RangeViolation";
    case Err::Compatibility: return "CompatibilityError";
    case Err::InteriorPoint: return "InteriorPoint";
    case Err::EdgeCaseUnsupported: return "EdgeCaseUnsupported";
    case Err::Window: return "WindowError";
    case Err::InsufficientTrajectories: return "InsufficientTrajectories";
    case Err::MismatchedSampling: return "MismatchedSampling";
    case Err::Sampler: return "SamplerError";
    case Err::Config: return "ConfigError";
    case Err::Io: return "IoError";
  }
  return "UnknownError";
}

}  // namespace dtlab
