#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace coopeig {

enum class ErrorCode {
  schema_error,
  validation_error,
  ellipticity_violation,
  cooperativity_violation,
  not_essentially_nonnegative,
  no_convergence,
  singular_step,
  reducible_spec,
  bracket_failure,
  shape_mismatch,
  invalid_decomposition,
  hypothesis_not_met,
  not_self_adjoint,
  enumeration_too_large,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception; carries a machine-readable code next to the message.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline bool nearly_equal(double a, double b, double tol) {
  return std::abs(a - b) <= tol;
}

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace coopeig
