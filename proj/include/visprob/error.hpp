#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace visprob {

enum class ErrorCode {
  InvalidInput,
  InvalidPolygon,
  VerticalLine,
  NonPositiveEpsilon,
  InterleavingViolated,
  NotSeparable,
  ObstacleOutsideSlab,
  ObstaclesOverlap,
  AmbiguousCase,
  SingularEvaluation,
  DegenerateDenominator,
  RegionsNotSeparable,
  NumericalFailure,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InvalidPolygon: return "InvalidPolygon";
    case ErrorCode::VerticalLine: return "VerticalLine";
    case ErrorCode::NonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorCode::InterleavingViolated: return "InterleavingViolated";
    case ErrorCode::NotSeparable: return "NotSeparable";
    case ErrorCode::ObstacleOutsideSlab: return "ObstacleOutsideSlab";
    case ErrorCode::ObstaclesOverlap: return "ObstaclesOverlap";
    case ErrorCode::AmbiguousCase: return "AmbiguousCase";
    case ErrorCode::SingularEvaluation: return "SingularEvaluation";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::RegionsNotSeparable: return "RegionsNotSeparable";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

// Every failure raised by the library carries a machine-readable code; the CLI
// maps codes onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace visprob
