#include "fractail/error.hpp"

namespace fractail {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PoleArgument: return "PoleArgument";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::BelowValidityThreshold: return "BelowValidityThreshold";
    case ErrorCode::InvalidCoefficients: return "InvalidCoefficients";
    case ErrorCode::RegionMismatch: return "RegionMismatch";
    case ErrorCode::NonPositiveTime: return "NonPositiveTime";
    case ErrorCode::NonPositiveEigenvalue: return "NonPositiveEigenvalue";
    case ErrorCode::TimeInsideSupport: return "TimeInsideSupport";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::AlphaIsOne: return "AlphaIsOne";
    case ErrorCode::TimeTooSmall: return "TimeTooSmall";
    case ErrorCode::DivergentCoefficients: return "DivergentCoefficients";
    case ErrorCode::InsufficientDecades: return "InsufficientDecades";
    case ErrorCode::DegenerateMoments: return "DegenerateMoments";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::InsufficientLadder: return "InsufficientLadder";
    case ErrorCode::NearDegenerateSpectrum: return "NearDegenerateSpectrum";
    case ErrorCode::InsufficientSpan: return "InsufficientSpan";
    case ErrorCode::IndistinguishableAtScale: return "IndistinguishableAtScale";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace fractail
