#pragma once

#include <stdexcept>
#include <string>

namespace kolmo {

enum class ErrorCode {
    invalid_argument = 1,
    dimension_mismatch,
    domain_error,
    hypothesis_violation,
    numeric_failure,
    config_error,
    io_error,
    unsupported,
    internal,
};

/// Exception type thrown by every routine in the library. The C API maps the
/// code onto its status enum.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

const char* to_string(ErrorCode code) noexcept;

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, ErrorCode code, const char* what) {
    if (!cond) fail(code, what);
}

}  // namespace kolmo
