#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tlsaa {

enum class ErrorCode {
  side_mismatch,
  backend_mismatch,
  non_invertible,
  empty_subset,
  bad_set_index,
  bad_attribute,
  incomplete_policy,
  nonce_reuse,
  incomplete_tokens,
  wrong_key,
  authentication_failure,
  bad_record,
  update_rejected,
  missing_apk,
  malformed,
  invalid_argument,
  not_found,
  io,
  unauthorized,
};

inline constexpr ErrorCode kLastErrorCode = ErrorCode::unauthorized;

std::string_view to_string(ErrorCode code) noexcept;

/// Every protocol-level failure is reported as an Error carrying a code, so
/// callers can tell a forced precondition failure from a malformed input.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// what() without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace tlsaa
