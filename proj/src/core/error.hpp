#pragma once

#include <stdexcept>
#include <string>

namespace mocu {

/// Error categories shared by every module. The values are mirrored one to one
/// by the status codes of the C API.
enum class ErrorCode : int {
  kDomain = 1,
  kNumeric = 2,
  kImpossibleOutcome = 3,
  kNotProper = 4,
  kDegenerate = 5,
  kExhausted = 6,
  kDivergence = 7,
  kEnumerationLimit = 8,
  kInconsistentObservation = 9,
  kRank = 10,
  kParse = 11,
  kConfig = 12,
  kEnvironment = 13,
  kConfigMismatch = 14,
  kIo = 15,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mocu
