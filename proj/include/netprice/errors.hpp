#pragma once
//
// Error taxonomy shared by the whole library, mapped to CLI exit codes:
//
//   * ValidationError            -- the caller's data violates a documented
//                                   precondition (bad instance, bad file,
//                                   bad parameter). CLI exit code 2.
//   * SingularMatrixError        -- exact elimination hit a structurally
//                                   singular system. Raised by the linear
//                                   algebra kernel; the spectral gate catches
//                                   it internally ("radius not below one").
//   * InternalInvariantViolation -- a property the algorithms themselves
//                                   guarantee failed to hold. Always a bug,
//                                   never a data problem. CLI exit code 3.

#include <stdexcept>
#include <string>

namespace netprice {

enum class ErrCode {
  SelfLoop,
  DegenerateInterval,
  NegativeLowerBound,
  NegativeInfluence,
  NonNegativityViolated,
  DeltaOutOfRange,
  EpsOutOfRange,
  ZeroBasePrice,
  GridTooLarge,
  SyntaxError,
  DuplicateAgent,
  DuplicateEdge,
  UnknownAgentRef,
  MalformedGame,
};

inline const char* to_string(ErrCode c) {
  switch (c) {
    case ErrCode::SelfLoop: return "SelfLoop";
    case ErrCode::DegenerateInterval: return "DegenerateInterval";
    case ErrCode::NegativeLowerBound: return "NegativeLowerBound";
    case ErrCode::NegativeInfluence: return "NegativeInfluence";
    case ErrCode::NonNegativityViolated: return "NonNegativityViolated";
    case ErrCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrCode::EpsOutOfRange: return "EpsOutOfRange";
    case ErrCode::ZeroBasePrice: return "ZeroBasePrice";
    case ErrCode::GridTooLarge: return "GridTooLarge";
    case ErrCode::SyntaxError: return "SyntaxError";
    case ErrCode::DuplicateAgent: return "DuplicateAgent";
    case ErrCode::DuplicateEdge: return "DuplicateEdge";
    case ErrCode::UnknownAgentRef: return "UnknownAgentRef";
    case ErrCode::MalformedGame: return "MalformedGame";
  }
  return "UnknownError";
}

class ValidationError : public std::runtime_error {
 public:
  ValidationError(ErrCode code, const std::string& msg)
      : std::runtime_error(std::string(to_string(code)) + ": " + msg),
        code_(code) {}
  ErrCode code() const { return code_; }

 private:
  ErrCode code_;
};

class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(const std::string& msg)
      : std::runtime_error("singular matrix: " + msg) {}
};

class InternalInvariantViolation : public std::logic_error {
 public:
  explicit InternalInvariantViolation(const std::string& msg)
      : std::logic_error("internal invariant violation: " + msg) {}
};

}  // namespace netprice
