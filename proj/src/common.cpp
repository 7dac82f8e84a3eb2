#include "coopeig/common.hpp"

#include <charconv>

namespace coopeig {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::schema_error: return "SCHEMA_ERROR";
    case ErrorCode::validation_error: return "VALIDATION_ERROR";
    case ErrorCode::ellipticity_violation: return "ELLIPTICITY_VIOLATION";
    case ErrorCode::cooperativity_violation: return "COOPERATIVITY_VIOLATION";
    case ErrorCode::not_essentially_nonnegative: return "NOT_ESSENTIALLY_NONNEGATIVE";
    case ErrorCode::no_convergence: return "NO_CONVERGENCE";
    case ErrorCode::singular_step: return "SINGULAR_STEP";
    case ErrorCode::reducible_spec: return "REDUCIBLE_SPEC";
    case ErrorCode::bracket_failure: return "BRACKET_FAILURE";
    case ErrorCode::shape_mismatch: return "SHAPE_MISMATCH";
    case ErrorCode::invalid_decomposition: return "INVALID_DECOMPOSITION";
    case ErrorCode::hypothesis_not_met: return "HYPOTHESIS_NOT_MET";
    case ErrorCode::not_self_adjoint: return "NOT_SELF_ADJOINT";
    case ErrorCode::enumeration_too_large: return "ENUMERATION_TOO_LARGE";
  }
  return "UNKNOWN";
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

}  // namespace coopeig
