#include "swipt/error.hpp"

namespace swipt {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NumericFailure: return "NumericFailure";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NoSplitInRange: return "NoSplitInRange";
    case ErrorCode::RepeatedPoles: return "RepeatedPoles";
    case ErrorCode::AliasingRisk: return "AliasingRisk";
    case ErrorCode::UnstableDiscretization: return "UnstableDiscretization";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SpecInfeasible: return "SpecInfeasible";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::SingularInductance: return "SingularInductance";
    case ErrorCode::NotSettled: return "NotSettled";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace swipt
