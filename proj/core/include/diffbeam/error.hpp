#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace diffbeam {

enum class ErrorCode {
  InvalidArgument,
  InvalidNulls,
  InvalidCoefficients,
  SingularConstraintMatrix,
  DimensionMismatch,
  ZeroFilter,
  DegenerateDenominator,
  RankDeficient,
  TooFewMicrophones,
  InfeasibleSlack,
  TrustRegionHardCase,
  ConfigInvalid,
  DesignFailed,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace diffbeam
