#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fractail {

enum class ErrorCode {
  InvalidArgument,
  PoleArgument,
  NonConvergent,
  BelowValidityThreshold,
  InvalidCoefficients,
  RegionMismatch,
  NonPositiveTime,
  NonPositiveEigenvalue,
  TimeInsideSupport,
  UnsupportedOrder,
  AlphaIsOne,
  TimeTooSmall,
  DivergentCoefficients,
  InsufficientDecades,
  DegenerateMoments,
  IllConditioned,
  InsufficientLadder,
  NearDegenerateSpectrum,
  InsufficientSpan,
  IndistinguishableAtScale,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

// Every library failure is reported through this type; `code()` is the
// machine-readable part, `what()` carries the context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace fractail
