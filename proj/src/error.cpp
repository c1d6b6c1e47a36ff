#include "emlab/error.hpp"

namespace emlab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativePowerOnNonzeroMean: return "NegativePowerOnNonzeroMean";
    case ErrorCode::BlockOutOfRange: return "BlockOutOfRange";
    case ErrorCode::DensityNonpositive: return "DensityNonpositive";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::AmplitudeTooLarge: return "AmplitudeTooLarge";
    case ErrorCode::NonNormalizedConstants: return "NonNormalizedConstants";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NonpositiveValue: return "NonpositiveValue";
    case ErrorCode::RequiresBInftyZero: return "RequiresBInftyZero";
    case ErrorCode::SOutOfRange: return "SOutOfRange";
    case ErrorCode::POutOfRange: return "POutOfRange";
    case ErrorCode::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorCode::ExponentMismatch: return "ExponentMismatch";
    case ErrorCode::ExactViolated: return "ExactViolated";
    case ErrorCode::EquivalenceViolated: return "EquivalenceViolated";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace emlab
