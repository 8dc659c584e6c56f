#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swipt {

enum class ErrorCode {
  DomainError,
  InvalidArgument,
  NumericFailure,
  SingularSystem,
  NoSplitInRange,
  RepeatedPoles,
  AliasingRisk,
  UnstableDiscretization,
  LengthMismatch,
  SpecInfeasible,
  StepTooLarge,
  SingularInductance,
  NotSettled,
  FormatError,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception. `code()` is stable and is what the CLI reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace swipt
