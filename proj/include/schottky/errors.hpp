#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace schottky {

/// Machine-readable failure categories. The CLI prints them verbatim.
enum class ErrorCode {
  InvalidArgument,
  Io,
  RankAmbiguous,
  NotDiagonalizable,
  BranchCut,
  UnsupportedType,
  NotARoot,
  UnsupportedRealForm,
  AnchorSingularity,
  RealityViolated,
  FormViolation,
  ParityObstruction,
  MaxAttemptsExceeded,
  SeparationFailure,
  CertificateFailed,
  SamplingStarved,
  MapUndefined,
};

constexpr std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::Io: return "IO_ERROR";
    case ErrorCode::RankAmbiguous: return "RANK_AMBIGUOUS";
    case ErrorCode::NotDiagonalizable: return "NOT_DIAGONALIZABLE";
    case ErrorCode::BranchCut: return "BRANCH_CUT";
    case ErrorCode::UnsupportedType: return "UNSUPPORTED_TYPE";
    case ErrorCode::NotARoot: return "NOT_A_ROOT";
    case ErrorCode::UnsupportedRealForm: return "UNSUPPORTED_REAL_FORM";
    case ErrorCode::AnchorSingularity: return "ANCHOR_SINGULARITY";
    case ErrorCode::RealityViolated: return "REALITY_VIOLATED";
    case ErrorCode::FormViolation: return "FORM_VIOLATION";
    case ErrorCode::ParityObstruction: return "PARITY_OBSTRUCTION";
    case ErrorCode::MaxAttemptsExceeded: return "MAX_ATTEMPTS_EXCEEDED";
    case ErrorCode::SeparationFailure: return "SEPARATION_FAILURE";
    case ErrorCode::CertificateFailed: return "CERTIFICATE_FAILED";
    case ErrorCode::SamplingStarved: return "SAMPLING_STARVED";
    case ErrorCode::MapUndefined: return "MAP_UNDEFINED";
  }
  return "UNKNOWN";
}

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

}  // namespace schottky
