#include "core/error.hpp"

namespace mocu {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kImpossibleOutcome: return "impossible-outcome";
    case ErrorCode::kNotProper: return "not-proper";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kExhausted: return "exhausted";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kEnumerationLimit: return "enumeration-limit";
    case ErrorCode::kInconsistentObservation: return "inconsistent-observation";
    case ErrorCode::kRank: return "rank";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kEnvironment: return "environment";
    case ErrorCode::kConfigMismatch: return "config-mismatch";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace mocu
