#include "diffbeam/error.hpp"

namespace diffbeam {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidNulls: return "InvalidNulls";
    case ErrorCode::InvalidCoefficients: return "InvalidCoefficients";
    case ErrorCode::SingularConstraintMatrix: return "SingularConstraintMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroFilter: return "ZeroFilter";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::TooFewMicrophones: return "TooFewMicrophones";
    case ErrorCode::InfeasibleSlack: return "InfeasibleSlack";
    case ErrorCode::TrustRegionHardCase: return "TrustRegionHardCase";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::DesignFailed: return "DesignFailed";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace diffbeam
